use proptest::prelude::*;
use shlie_cli::Structure;

const WORDS: [&str; 6] = ["1", "f", "g", "f^f", "f^g", "f^g^g"];
const COEFFS: [&str; 7] = ["1", "-2", "3/4", "u", "(u + 1)", "(u^2 - u[u;x])", "-u[u;x,x]"];

fn value(targets: &[&str], picks: &[(usize, usize)]) -> String {
    let terms: Vec<String> =
        picks.iter().map(|&(c, t)| format!("{} * {}", COEFFS[c % COEFFS.len()], targets[t % targets.len()])).collect();
    terms.join(" + ")
}

type Picks = Vec<(usize, usize)>;

fn gauge_text(entries: &[(usize, usize, Picks)], corr: &[(usize, Picks)]) -> String {
    let mut s = String::from(
        "kind = \"gauge\"\nname = \"random\"\nxi = [\"a\", \"b\"]\nphi = [\"f\", \"g\"]\n\n[jet]\nfields = [\"u\"]\nderivations = [\"x\"]\nmax_order = 2\n",
    );
    let mut seen = std::collections::BTreeSet::new();
    for (of, w, picks) in entries {
        let (of, w) = (["a", "b"][of % 2], WORDS[w % WORDS.len()]);
        if !seen.insert((of, w)) {
            continue;
        }
        s += &format!("\n[[delta]]\nof = \"{of}\"\nword = \"{w}\"\nvalue = \"{}\"\n", value(&["f", "g"], picks));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (w, picks) in corr {
        let w = WORDS[w % WORDS.len()];
        if !seen.insert(w) {
            continue;
        }
        s += &format!(
            "\n[[correction]]\npair = [\"a\", \"b\"]\nword = \"{w}\"\nvalue = \"{}\"\n",
            value(&["a", "b"], picks)
        );
    }
    s
}

fn picks() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..16, 0usize..4), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_text_is_a_fixed_point(
        entries in prop::collection::vec((0usize..2, 0usize..6, picks()), 0..6),
        corr in prop::collection::vec((0usize..6, picks()), 0..3),
    ) {
        let text = gauge_text(&entries, &corr);
        let s = Structure::parse(&text).unwrap();
        let canon = s.to_toml();
        let again = Structure::parse(&canon).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.to_toml(), canon);
    }
}
