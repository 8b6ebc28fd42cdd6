use cgt_core::schreier::{schreier_rank, subgroup_presentation, tietze_simplify};
use cgt_core::{enumerate, parse_presentation, EnumLimits};
use cgt_workbench::pipeline::{run_chain, ChainInput, Status, Verdict};

fn limits() -> EnumLimits {
    EnumLimits::default()
}

#[test]
fn all_checks_pass_on_the_real_instance() {
    let r = run_chain(&ChainInput::default(), limits(), 8);
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
    assert_eq!(r.checks.len(), 10);
    assert_eq!(r.check(6).computed["generators"], 17);
    assert_eq!(r.check(8).computed["relators"], 8);
    assert_eq!(r.check(8).computed["all_cosets_agree"], true);
}

#[test]
fn report_is_byte_deterministic() {
    let a = serde_json::to_string(&run_chain(&ChainInput::default(), limits(), 8)).unwrap();
    let b = serde_json::to_string(&run_chain(&ChainInput::default(), limits(), 8)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tiny_limits_make_the_run_incomplete() {
    let r = run_chain(&ChainInput::default(), EnumLimits::new(4), 8);
    assert_eq!(r.verdict, Verdict::Incomplete);
    assert_eq!(r.check(1).status, Status::Pass);
    for id in 2..=9 {
        assert_eq!(r.check(id).status, Status::Inconclusive, "check {id}");
    }
}

#[test]
fn wrong_relator_breaks_the_index_in_g() {
    let r = run_chain(&ChainInput::wrong_relator(), limits(), 8);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.check(1).status, Status::Pass);
    assert_eq!(r.check(9).status, Status::Fail);
    // Baseline: (xy)^7 collapses the image of C to index 2.
    assert_eq!(r.check(9).computed, 2);
    assert_eq!(r.check(8).status, Status::Fail);
}

#[test]
fn wrong_generator_breaks_the_kernel_check() {
    let r = run_chain(&ChainInput::wrong_generator(), limits(), 8);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.check(2).status, Status::Fail);
    assert_eq!(r.check(2).computed["in_kernel"], false);
    assert_eq!(r.check(2).computed["index"], 4);
    assert!((3..=9).all(|id| r.check(id).status == Status::Inconclusive));
}

// Oracles that avoid the composed table: enumerate C directly from
// generators obtained through the pipeline's own route, and compare.
#[test]
fn direct_enumeration_agrees_with_the_chain() {
    let a = parse_presentation("gens: x, y\nrels: x^2, y^4").unwrap();
    let g = parse_presentation("gens: x, y\nrels: x^2, y^4, (x*y)^8").unwrap();
    let w = |s: &str| a.word(s).unwrap();
    let b_gens = vec![w("x*y*x^-1*y^-1"), w("x*y^2*x^-1*y^-2"), w("x*y^3*x^-1*y^-3")];
    let tb = enumerate(&a, &b_gens, limits()).unwrap().table;
    assert_eq!(tb.index(), 8);
    // C = B^2 is the normal closure in A of these: modulo them B is
    // generated by three commuting involutions, and all of them lie in C.
    let mut c_gens = Vec::new();
    for (i, u) in b_gens.iter().enumerate() {
        c_gens.push(u.pow(2));
        for v in &b_gens[i + 1..] {
            c_gens.push(cgt_core::commutator(u, v));
            c_gens.push(u.mul(v).pow(2));
        }
    }
    // Cayley table of A/C = coset table of C in A.
    let tc = enumerate(&a.with_relators(c_gens.clone()).unwrap(), &[], limits()).unwrap().table;
    tc.validate(&a, &[]).unwrap();
    assert_eq!(tc.index(), 64);
    assert_eq!(tc.index(), tb.index() * 8);
    let sp = tietze_simplify(&subgroup_presentation(&a, &tc).unwrap(), 1_000_000);
    assert_eq!((sp.ngens(), sp.nrels()), (17, 0));
    assert_eq!(schreier_rank(3, 8), 17);
    let xy = w("x*y");
    // (xy)^4 in B \ C, (xy)^8 in C.
    assert_eq!(tb.trace(&xy.pow(4), 0), 0);
    assert_ne!(tc.trace(&xy.pow(4), 0), 0);
    assert_eq!(tc.trace(&xy.pow(8), 0), 0);
    let ac = a.with_relators(c_gens.clone()).unwrap();
    assert_eq!(enumerate(&ac, std::slice::from_ref(&xy), limits()).unwrap().table.index(), 8);
    let gc = g.with_relators(c_gens.clone()).unwrap();
    assert_eq!(enumerate(&gc, &[], limits()).unwrap().table.index(), 64);
    // The 17 free generators, as a plain subgroup of G, have index 64.
    assert_eq!(enumerate(&g, &sp.ambient_words(), limits()).unwrap().table.index(), 64);
}

#[test]
fn multiplicativity_inside_the_run() {
    let r = run_chain(&ChainInput::default(), limits(), 8);
    let ab = r.check(2).computed["index"].as_u64().unwrap();
    let bc = r.check(4).computed.as_u64().unwrap();
    let ac = r.check(6).computed["index"].as_u64().unwrap();
    assert_eq!(ab * bc, ac);
}
