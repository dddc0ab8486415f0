//! Descent fixtures: the twisted curve y^2 = x^3 + 45x (p = 5 twisted by
//! D = -3) with its membership and exclusion structure, and the regression
//! curve y^2 = x^3 + 17x whose Selmer dimensions were pinned by the
//! independent deeper-sweep oracle before being frozen here.

use isodescent::arith::SquareClass;
use isodescent::descent::{
    bad_set, field_selmer, phi_selmer, phi_selmer_extended, sha2_upper_bound, IsogenySide,
    MonicIsogenyCurve, SelmerReport,
};
use isodescent::localfield::{
    exhaustive_unsolvability_recheck, Place, QuarticTorsor, SolvabilityCertificate, Verdict,
    DEFAULT_DEPTH_CAP, DEFAULT_REVALIDATION_BUDGET,
};

const CAP: u32 = DEFAULT_DEPTH_CAP;

fn curve(a: i64) -> MonicIsogenyCurve {
    MonicIsogenyCurve::new(a).unwrap()
}

/// Every certificate in a report must hold up: witnesses re-substitute, and
/// exclusions survive an independent exhaustive sweep two levels deeper.
fn audit_report(report: &SelmerReport) {
    for entry in &report.certificates {
        let cert: &SolvabilityCertificate = &entry.certificate;
        cert.revalidate(DEFAULT_REVALIDATION_BUDGET)
            .unwrap_or_else(|e| panic!("d={} v={}: {}", entry.d, entry.place, e));
        if cert.verdict == Verdict::Unsolvable {
            let t =
                QuarticTorsor::new(SquareClass::new(entry.d).unwrap(), report.torsor_e).unwrap();
            exhaustive_unsolvability_recheck(
                &t,
                &entry.place,
                cert.depth_used + 2,
                DEFAULT_REVALIDATION_BUDGET,
            )
            .unwrap_or_else(|e| {
                panic!("deeper sweep failed d={} v={}: {}", entry.d, entry.place, e)
            });
        }
    }
}

#[test]
fn membership_fixture_p5_twist_minus3() {
    // E_D: y^2 = x^3 + 45x, phi side: torsor e = -180
    let c = curve(45);
    let phi = phi_selmer(&c, IsogenySide::Phi, CAP).unwrap();

    // -p = -5 is a member through the points at infinity [1 : +-2D : 0]
    assert!(phi.contains(-5), "members: {:?}", phi.members);
    assert!(phi.contains(1));
    assert!(phi.dimension <= 2, "dim Sel^phi = {}", phi.dimension);

    // the class of 2 dies at the 2-adic place
    let at2 = phi.certificate(2, &Place::Finite(2)).unwrap();
    assert_eq!(at2.verdict, Verdict::Unsolvable);

    // D, pD, 2pD, 2D all die at the 3-adic place
    for d in [-3i64, -15, -30, -6] {
        let cert = phi.certificate(d, &Place::Finite(3)).unwrap();
        assert_eq!(cert.verdict, Verdict::Unsolvable, "d = {}", d);
        assert!(!phi.contains(d));
    }

    let phi_hat = phi_selmer(&c, IsogenySide::PhiHat, CAP).unwrap();
    assert!(
        phi_hat.dimension <= 1,
        "dim Sel^phi_hat = {}",
        phi_hat.dimension
    );

    // negative classes die at the real place on the phi-hat side (e > 0)
    for d in [-1i64, -2, -3, -5] {
        let cert = phi_hat.certificate(d, &Place::RealInfinite).unwrap();
        assert_eq!(cert.verdict, Verdict::Unsolvable);
    }

    // bound: e + f - 1 - 1 with rank 0, parity-adjusted to 0
    let bound = sha2_upper_bound(&c, phi.dimension, phi_hat.dimension, Some(0), true);
    assert_eq!(bound.upper_dim_parity, Some(0));

    audit_report(&phi);
    audit_report(&phi_hat);
}

#[test]
fn exclusion_propagates_through_the_group() {
    let c = curve(45);
    let phi = phi_selmer(&c, IsogenySide::Phi, CAP).unwrap();
    // -p in Sel and D not in Sel force -pD not in Sel
    assert!(phi.contains(-5));
    assert!(!phi.contains(-3));
    assert!(!phi.contains(15)); // (-5) * (-3)
    for m in &phi.members {
        for x in &phi.ambient.elements {
            if !phi.members.contains(x) {
                let prod = m.mul(x).unwrap();
                assert!(
                    !phi.members.contains(&prod),
                    "member {} times non-member {} stayed inside",
                    m,
                    x
                );
            }
        }
    }
}

#[test]
fn regression_curve_17_selmer_dimensions() {
    // Frozen after pinning with the deeper-sweep oracle (depth + 2): the
    // phi-Selmer group of y^2 = x^3 + 17x is all of Q(S,2) and the phi-hat
    // side is {1, 17}.
    let c = curve(17);
    let phi = phi_selmer(&c, IsogenySide::Phi, CAP).unwrap();
    let phi_hat = phi_selmer(&c, IsogenySide::PhiHat, CAP).unwrap();

    assert_eq!(phi.dimension, 3);
    let reps: Vec<i64> = phi.members.iter().map(|m| m.rep()).collect();
    assert_eq!(reps, vec![1, -1, 2, -2, 17, -17, 34, -34]);

    assert_eq!(phi_hat.dimension, 1);
    let reps: Vec<i64> = phi_hat.members.iter().map(|m| m.rep()).collect();
    assert_eq!(reps, vec![1, 17]);

    // rank 0 and finiteness give the parity-adjusted bound 2, the order-4
    // bound matching Sha(E/Q)[2] = Z/2 x Z/2
    let bound = sha2_upper_bound(&c, phi.dimension, phi_hat.dimension, Some(0), true);
    assert_eq!(bound.upper_dim_raw, 2);
    assert_eq!(bound.upper_dim_parity, Some(2));
    assert_eq!(bound.order_bound(), 4);

    audit_report(&phi);
    audit_report(&phi_hat);
}

#[test]
fn field_selmer_exact_sets() {
    let g = field_selmer(&bad_set(&curve(45)));
    assert_eq!(g.order(), 16);
    let g = field_selmer(&bad_set(&curve(17)));
    assert_eq!(g.order(), 8);
    let reps: Vec<i64> = g.elements.iter().map(|c| c.rep()).collect();
    assert_eq!(reps, vec![1, -1, 2, -2, 17, -17, 34, -34]);
}

#[test]
fn good_place_redundancy() {
    // extending S by a good odd prime never changes the members
    for a in [17i64, 45, -1, 6] {
        let c = curve(a);
        for side in [IsogenySide::Phi, IsogenySide::PhiHat] {
            let base = phi_selmer(&c, side, CAP).unwrap();
            for extra in [7u64, 11, 13] {
                if a % extra as i64 == 0 {
                    continue;
                }
                let extended = phi_selmer_extended(&c, side, &[extra], CAP).unwrap();
                let base_reps: Vec<i64> = base.members.iter().map(|m| m.rep()).collect();
                let ext_reps: Vec<i64> = extended
                    .members
                    .iter()
                    .map(|m| m.rep())
                    .filter(|r| {
                        // compare within the smaller ambient group
                        base.ambient.elements.iter().any(|x| x.rep() == *r)
                    })
                    .collect();
                assert_eq!(base_reps, ext_reps, "a={} side={} extra={}", a, side, extra);
            }
        }
    }
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let c = curve(45);
    let compute = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| phi_selmer(&c, IsogenySide::Phi, CAP).unwrap())
    };
    let one = compute(1);
    let four = compute(4);
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&four).unwrap()
    );
}
