use proptest::prelude::*;

use expgraph::graph::{parse_graph, serialize_triples, ExplanationGraph, GraphFormat, Triple, SYNTHETIC16};
use expgraph::metrics::{graph_bertscore, graph_edit_distance, ExactMatch, GedConfig, TokenF1};

const WORDS: [&str; 6] = ["rain", "wet_road", "car_crash", "ice", "cold_weather", "slow_traffic"];

fn graph_strategy(max: usize) -> impl Strategy<Value = ExplanationGraph> {
    prop::collection::vec((0..WORDS.len(), 0..SYNTHETIC16.len(), 0..WORDS.len()), 1..=max)
        .prop_filter_map("needs a non-empty graph", |raw| {
            let mut triples: Vec<Triple> = Vec::new();
            for (h, r, t) in raw {
                if h == t {
                    continue;
                }
                let triple = Triple::parse(WORDS[h], SYNTHETIC16[r], WORDS[t]).unwrap();
                if !triples.contains(&triple) {
                    triples.push(triple);
                }
            }
            if triples.is_empty() {
                return None;
            }
            ExplanationGraph::new(triples).ok()
        })
}

proptest! {
    #[test]
    fn pipe_and_paren_round_trip(g in graph_strategy(6)) {
        for format in [GraphFormat::Pipe, GraphFormat::Paren] {
            let text = serialize_triples(g.triples(), format);
            let back = parse_graph(&text, format).unwrap();
            prop_assert!(back.same_triples(&g), "{format:?}: {text}");
        }
    }

    #[test]
    fn linearization_ignores_input_order(g in graph_strategy(6), rot in 0usize..6) {
        prop_assume!(g.is_dag() && g.is_connected());
        let mut shuffled = g.triples().to_vec();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let other = ExplanationGraph::new(shuffled).unwrap();
        prop_assert_eq!(g.linearize_dfs().unwrap(), other.linearize_dfs().unwrap());
    }

    #[test]
    fn ged_is_a_metric(a in graph_strategy(4), b in graph_strategy(4), c in graph_strategy(4)) {
        let cfg = GedConfig::default();
        let d = |x: &ExplanationGraph, y: &ExplanationGraph| graph_edit_distance(x, y, &cfg).unwrap();
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
        prop_assert_eq!(ab.raw_ops, ba.raw_ops);
        prop_assert_eq!(d(&a, &a).raw_ops, 0);
        prop_assert_eq!(ab.raw_ops == 0, a.same_triples(&b));
        prop_assert!(ac.raw_ops <= ab.raw_ops + bc.raw_ops);
        prop_assert!((0.0..=1.0).contains(&ab.normalized));
        prop_assert_eq!(ab.op_trace.len() as u32, ab.raw_ops);
    }

    #[test]
    fn gbs_stays_in_unit_interval(a in graph_strategy(6), b in graph_strategy(6)) {
        for s in [graph_bertscore(&a, &b, &TokenF1), graph_bertscore(&a, &b, &ExactMatch)] {
            prop_assert!((0.0..=1.0).contains(&s.precision));
            prop_assert!((0.0..=1.0).contains(&s.recall));
            prop_assert!((0.0..=1.0).contains(&s.f1));
        }
        prop_assert_eq!(graph_bertscore(&a, &a, &TokenF1).f1, 1.0);
    }
}
