use megame_core::analysis::{is_ambiguous, is_disinterested, is_dog_whistle, live_histories, DisinterestVerdict, Symmetry};
use megame_core::epistemic::{interpret, run_rounds};
use megame_core::rational::ratio;
use megame_core::scenarios::builtin;
use megame_core::Rational;

/// Hand-written replica of the spokesman's strategy rows: the responses each
/// prescribes for rounds 1..=3 (`None` = unconstrained).
fn rows() -> Vec<(&'static str, [Option<&'static str>; 3])> {
    let a = Some("phi_alpha");
    vec![
        ("sigma1", [Some("yes"), None, None]),
        ("sigma2", [Some("no"), None, None]),
        ("sigma3", [a, Some("yes"), None]),
        ("sigma4", [a, Some("no"), None]),
        ("sigma5", [a, a, Some("yes")]),
        ("sigma6", [a, a, Some("no")]),
        ("sigma7", [a, a, a]),
    ]
}

/// Posterior of `t_H` after `k` observed repetitions, computed by direct
/// counting over the prior table, plus the mass of the k-th observation
/// relative to the posterior after k-1.
fn oracle(prior: &[(&str, &str, Rational)], k: usize) -> (Rational, Rational) {
    let alive = |n: usize, s: &str| {
        let row = rows().into_iter().find(|r| r.0 == s).unwrap().1;
        row[..n].iter().all(|m| m.is_none() || *m == Some("phi_alpha"))
    };
    let mass = |n: usize, t: Option<&str>| -> Rational {
        prior
            .iter()
            .filter(|(ty, s, _)| alive(n, s) && t.is_none_or(|t| t == *ty))
            .map(|(_, _, p)| p.clone())
            .sum()
    };
    let h = mass(k, Some("t_H")) / mass(k, None);
    let event = if k == 0 { ratio(1, 1) } else { mass(k, None) / mass(k - 1, None) };
    (h, event)
}

fn tj_u_prior() -> Vec<(&'static str, &'static str, Rational)> {
    let mut v = vec![];
    for s in ["sigma2", "sigma4", "sigma6"] {
        v.push(("t_H", s, ratio(1, 6)));
    }
    for s in ["sigma1", "sigma3", "sigma5", "sigma7"] {
        v.push(("t_D", s, ratio(1, 8)));
    }
    v
}

fn tj_b_prior() -> Vec<(&'static str, &'static str, Rational)> {
    let mut v = vec![];
    for s in ["sigma2", "sigma4", "sigma6", "sigma7"] {
        v.push(("t_H", s, ratio(7, 40)));
    }
    for s in ["sigma1", "sigma3", "sigma5"] {
        v.push(("t_D", s, ratio(1, 10)));
    }
    v
}

#[test]
fn trajectories_match_direct_counting() {
    let spec = builtin("sheehan").unwrap();
    for (jt, prior) in [("tj_U", tj_u_prior()), ("tj_B", tj_b_prior())] {
        let traj = run_rounds(&spec, jt, 2).unwrap();
        for k in 0..=2 {
            let (h, event) = oracle(&prior, k);
            let point = &traj.points[k];
            assert_eq!(point.probability("t_H").unwrap(), &h, "{jt} round {k}");
            assert_eq!(point.probability("t_D").unwrap(), &(ratio(1, 1) - &h), "{jt} round {k}");
            if k > 0 {
                assert_eq!(point.event_mass.as_ref().unwrap(), &event, "{jt} round {k}");
            }
        }
    }
}

#[test]
fn published_trajectory_values() {
    let spec = builtin("sheehan").unwrap();
    let u = run_rounds(&spec, "tj_U", 2).unwrap();
    assert_eq!(u.series("t_H"), vec![ratio(1, 2), ratio(8, 17), ratio(2, 5)]);
    assert_eq!(u.series("t_D"), vec![ratio(1, 2), ratio(9, 17), ratio(3, 5)]);
    let b = run_rounds(&spec, "tj_B", 2).unwrap();
    assert_eq!(b.series("t_H"), vec![ratio(7, 10), ratio(21, 29), ratio(7, 9)]);
    assert_eq!(b.series("t_D"), vec![ratio(3, 10), ratio(8, 29), ratio(2, 9)]);
    assert_eq!(u.points[1].event_mass, Some(ratio(17, 24)));
    assert_eq!(b.points[2].event_mass, Some(ratio(18, 29)));
}

#[test]
fn third_round_exhausts_compatible_honest_rows_for_tj_u() {
    let spec = builtin("sheehan").unwrap();
    let u = run_rounds(&spec, "tj_U", 3).unwrap();
    // After three repetitions only sigma7 (t_D) survives.
    assert_eq!(u.series("t_D")[3], ratio(1, 1));
    assert!(run_rounds(&spec, "tj_U", 4).is_err());
}

#[test]
fn interpretation_kernels() {
    let spec = builtin("sheehan").unwrap();
    let ts = &spec.type_space;
    let types = |t: &str| ["t_R".to_string(), t.to_string()];
    let d = interpret(ts, "tj_U", &types("t_D"), "rho").unwrap();
    assert!(d.weight(&0) > d.weight(&7));
    assert_eq!(live_histories(&spec, "tj_U", "rho").unwrap(), vec![0, 7]);
    // Observing h² raises t_H for tj_U: 1/2·3/5 against 1/2·1/10.
    let h = ratio(1, 2) * ratio(3, 5);
    let dd = ratio(1, 2) * ratio(1, 10);
    assert_eq!(h.clone() / (h + dd), ratio(6, 7));
}

#[test]
fn ambiguity_and_dog_whistles() {
    let sheehan = builtin("sheehan").unwrap();
    assert!(is_ambiguous(&sheehan, "tj_U", "rho").unwrap().ambiguous);
    let pool = vec!["tj_U".to_string(), "tj_B".to_string()];
    assert_eq!(is_dog_whistle(&sheehan, "tj_U", "rho", 0, &pool).unwrap(), None);

    let lepen = builtin("lepen").unwrap();
    let pool = vec!["tj_N".to_string(), "tj_G".to_string()];
    let w = is_dog_whistle(&lepen, "tj_N", "lepen", 0, &pool).unwrap().expect("witness");
    assert_eq!((w.loaded_history, w.grammar_history, w.affected_jury.as_str()), (1, 0, "tj_N"));
    // The general jury only ever sees the plain reading.
    assert!(!is_ambiguous(&lepen, "tj_G", "lepen").unwrap().ambiguous);
}

#[test]
fn disinterest() {
    let sheehan = builtin("sheehan").unwrap();
    let b = is_disinterested(&sheehan, "tj_B", 4).unwrap();
    assert_eq!(b.verdict, DisinterestVerdict::NotDisinterested);
    assert_eq!(b.symmetry, Symmetry::Incomparable);

    let toy = builtin("truth_toy").unwrap();
    let fair = is_disinterested(&toy, "tj_fair", 4).unwrap();
    assert_eq!(fair.verdict, DisinterestVerdict::NecessaryConditionsMet);
    let partisan = is_disinterested(&toy, "tj_partisan", 4).unwrap();
    assert_eq!(partisan.verdict, DisinterestVerdict::NotDisinterested);
}

#[test]
fn march_for_science_leads_share_facts_but_not_structure() {
    let spec = builtin("march_for_science").unwrap();
    let ids = ["nyt", "townhall", "newsbusters"];
    let hs: Vec<_> = ids.iter().map(|u| spec.history(u, 0).unwrap().clone()).collect();
    for a in 0..3 {
        for b in a + 1..3 {
            let facts = |h: &megame_core::discourse::History| h.edus().map(|e| e.id.clone()).collect::<Vec<_>>();
            assert_eq!(facts(&hs[a]), facts(&hs[b]));
            assert!(megame_core::game::history_distance(&hs[a], &hs[b]).unwrap() > ratio(0, 1));
        }
    }
}

#[test]
fn truth_toy_solves_for_the_attacker() {
    let spec = builtin("truth_toy").unwrap();
    let tree = spec.game_tree(2).unwrap();
    let sol = megame_core::game::solve_finite(&tree).unwrap();
    assert!(sol.wins_every_playout(&tree));
}
