use std::fmt::Write as _;

use rayon::prelude::*;

use super::index::CodeIndex;
use super::judge::RelevanceJudge;
use super::metrics::{average_precision_with_total, interpolated_precision, ndcg_at_k, RECALL_LEVELS};
use crate::error::Result;

/// Cutoff for NDCG.
pub const NDCG_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ranker {
    /// Ascending Hamming distance.
    Hamming,
    /// Descending cosine similarity of the real vectors.
    Cosine,
    /// Hamming-ball candidates re-ranked by cosine similarity.
    FilterRerank { radius: u32 },
}

impl Ranker {
    pub fn describe(&self) -> String {
        match self {
            Ranker::Hamming => "hamming".into(),
            Ranker::Cosine => "cosine".into(),
            Ranker::FilterRerank { radius } => format!("filter-rerank radius={radius}"),
        }
    }

    pub fn rank(&self, index: &CodeIndex, query: &str) -> Result<Vec<usize>> {
        match *self {
            Ranker::Hamming => index.rank_by_code(query),
            Ranker::Cosine => index.rank_by_cosine(query),
            Ranker::FilterRerank { radius } => index.filter_then_rerank(query, radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub query: String,
    pub average_precision: f64,
    pub ndcg: f64,
    /// Relevant documents in the collection, excluding the query.
    pub relevant: usize,
    pub retrieved: usize,
    pub top: Vec<String>,
    interpolated: Option<[f64; RECALL_LEVELS]>,
}

impl QueryResult {
    /// Queries without any relevant document do not enter the aggregates.
    pub fn excluded(&self) -> bool {
        self.relevant == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRun {
    pub ranker: String,
    pub bits: usize,
    pub queries: Vec<QueryResult>,
    pub map: f64,
    pub ndcg_at_10: f64,
    pub pr_curve: Vec<(f64, f64)>,
    pub excluded: usize,
}

impl EvalRun {
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ranker {}", self.ranker);
        let _ = writeln!(s, "bits {}", self.bits);
        let _ = writeln!(s, "queries {}", self.queries.len());
        let _ = writeln!(s, "excluded_queries {}", self.excluded);
        let _ = writeln!(s, "map {:.6}", self.map);
        let _ = writeln!(s, "ndcg@10 {:.6}", self.ndcg_at_10);
        s
    }

    pub fn pr_csv(&self) -> String {
        let mut s = String::from("recall,precision\n");
        for (r, p) in &self.pr_curve {
            let _ = writeln!(s, "{r:.1},{p:.6}");
        }
        s
    }
}

fn evaluate_query(index: &CodeIndex, judge: &RelevanceJudge, ranker: Ranker, query: &str) -> Result<QueryResult> {
    let q = index.position(query)?;
    let q_labels = judge.labels(query)?;
    let mut pool = vec![0.0; index.len()];
    for (p, id) in index.ids().iter().enumerate() {
        if p != q {
            pool[p] = judge.grade(q_labels, judge.labels(id)?);
        }
    }
    let ranked = ranker.rank(index, query)?;
    let grades: Vec<f64> = ranked.iter().map(|&p| pool[p]).collect();
    let relevant = pool.iter().filter(|&&g| g > 0.0).count();
    Ok(QueryResult {
        query: query.to_owned(),
        average_precision: average_precision_with_total(&grades, relevant),
        ndcg: ndcg_at_k(&grades, &pool, NDCG_K),
        relevant,
        retrieved: ranked.len(),
        top: ranked.iter().take(NDCG_K).map(|&p| index.ids()[p].clone()).collect(),
        interpolated: interpolated_precision(&grades, relevant),
    })
}

/// Ranks the collection for every query and aggregates MAP, NDCG@10 and
/// the 11-point precision-recall curve. `queries` defaults to every
/// indexed document.
pub fn evaluate(index: &CodeIndex, judge: &RelevanceJudge, ranker: Ranker, queries: Option<&[String]>) -> Result<EvalRun> {
    let queries = queries.unwrap_or(index.ids());
    let results: Vec<QueryResult> = queries
        .par_iter()
        .map(|q| evaluate_query(index, judge, ranker, q))
        .collect::<Result<_>>()?;
    let used: Vec<&QueryResult> = results.iter().filter(|r| !r.excluded()).collect();
    let mean = |f: &dyn Fn(&QueryResult) -> f64| {
        if used.is_empty() {
            0.0
        } else {
            used.iter().map(|r| f(r)).sum::<f64>() / used.len() as f64
        }
    };
    let map = mean(&|r| r.average_precision);
    let ndcg_at_10 = mean(&|r| r.ndcg);
    let pr_curve = (0..RECALL_LEVELS)
        .map(|l| (l as f64 / 10.0, mean(&|r| r.interpolated.expect("included queries have a curve")[l])))
        .collect();
    Ok(EvalRun {
        ranker: ranker.describe(),
        bits: index.width(),
        excluded: results.len() - used.len(),
        queries: results,
        map,
        ndcg_at_10,
        pr_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RelevanceMode;
    use crate::model::pack_bits;

    fn setup() -> (CodeIndex, RelevanceJudge) {
        let docs = [
            ("a", [0, 0, 0, 0], "x"),
            ("b", [0, 0, 0, 1], "x"),
            ("c", [1, 1, 1, 1], "y"),
            ("d", [1, 1, 1, 0], "y"),
            ("e", [0, 1, 1, 0], "z"),
        ];
        let index = CodeIndex::new(docs.iter().map(|(id, c, _)| (id.to_string(), pack_bits(c).unwrap())).collect()).unwrap();
        let judge = RelevanceJudge::new(RelevanceMode::SameLabel, docs.iter().map(|(id, _, l)| (*id, vec![l.to_string()])));
        (index, judge)
    }

    #[test]
    fn perfect_codes_score_one() {
        let (index, judge) = setup();
        let run = evaluate(&index, &judge, Ranker::Hamming, None).unwrap();
        assert_eq!(run.excluded, 1);
        assert_eq!(run.map, 1.0);
        assert_eq!(run.ndcg_at_10, 1.0);
        assert!(run.pr_curve.iter().all(|&(_, p)| p == 1.0));
        assert_eq!(run.queries[0].top, ["b", "e", "d", "c"]);
        assert!(run.report().contains("map 1.000000\n"));
        assert!(run.pr_csv().starts_with("recall,precision\n0.0,1.000000\n"));
    }

    #[test]
    fn identical_queries_average_to_their_ap() {
        let (index, judge) = setup();
        let qs = vec!["a".to_string(), "a".to_string()];
        let one = evaluate(&index, &judge, Ranker::Hamming, Some(&qs[..1])).unwrap();
        let two = evaluate(&index, &judge, Ranker::Hamming, Some(&qs)).unwrap();
        assert_eq!(one.map, two.map);
    }

    #[test]
    fn short_filtered_lists_are_penalized() {
        let (index, judge) = setup();
        let vectors: Vec<Vec<f32>> = (0..5).map(|i| vec![1.0, i as f32]).collect();
        let index = index.with_vectors(&vectors).unwrap();
        let q = vec!["c".to_string()];
        // radius 0 retrieves nothing for c, so its relevant neighbour d is missed
        let run = evaluate(&index, &judge, Ranker::FilterRerank { radius: 0 }, Some(&q)).unwrap();
        assert_eq!(run.map, 0.0);
        assert_eq!(run.ndcg_at_10, 0.0);
        let run = evaluate(&index, &judge, Ranker::FilterRerank { radius: 1 }, Some(&q)).unwrap();
        assert_eq!(run.map, 1.0);
    }

    #[test]
    fn unknown_query_fails() {
        let (index, judge) = setup();
        let q = vec!["nope".to_string()];
        assert!(evaluate(&index, &judge, Ranker::Hamming, Some(&q)).is_err());
    }
}
