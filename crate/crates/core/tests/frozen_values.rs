//! Values computed once from independent routes and frozen.

use iwasawa_core::iwasawa::{
    build_modulus, chi_series, common_twist, interpolation_checks, kubota_leopoldt, Level,
};
use iwasawa_core::numberfield::{list_even_characters, make_field, parse_element, Character, IdealHNF};
use iwasawa_core::padic::PadicInt;
use iwasawa_core::shintani::{twisted_values, untwist, TraceScaling};
use num_bigint::BigInt;
use num_rational::BigRational;

fn quad5() -> (iwasawa_core::numberfield::FieldData, iwasawa_core::iwasawa::ModulusData, Character) {
    let q = make_field(1).unwrap();
    let md = build_modulus(&q, &IdealHNF::from_int(&q, 5), TraceScaling::None).unwrap();
    let chi = list_even_characters(&md.rcd, 2).into_iter().find(|c| c.order == 2).unwrap();
    (q, md, chi)
}

#[test]
fn kubota_leopoldt_series_q_p5() {
    let (q, md, chi) = quad5();
    let lv = Level::new(5, 3, 1, 4).unwrap();
    let kl = kubota_leopoldt(&q, &md.rcd, &chi, 5, 7, &lv).unwrap();
    assert_eq!(kl.coeffs, vec![463, 528, 261, 619, 105]);
    let tw = common_twist(&q, &[&md], 5, Some(7)).unwrap();
    let z = chi_series(&q, &md, &chi, &tw, &lv).unwrap();
    assert_eq!(z.coeffs, vec![162, 97, 364, 6, 520]);
    assert_eq!(kl, z.scale(&-PadicInt::one(5, 4)));
    assert_eq!(z.mu(), Some(0));
}

#[test]
fn dedekind_values_at_minus_one() {
    for (d, want) in [(5i64, (1, 30)), (2, (1, 12)), (13, (1, 6))] {
        let k = make_field(d).unwrap();
        let md = build_modulus(&k, &IdealHNF::unit(2), TraceScaling::None).unwrap();
        let tw = common_twist(&k, &[&md], 0, None).unwrap();
        let lats: Vec<_> = md.classes.iter().map(|c| c.lattices.clone()).collect();
        let tv = twisted_values(&k, &md.rcd, &tw, 2, &lats).unwrap();
        let total: BigRational = untwist(&k, &md.rcd, &tw, 2, &tv).unwrap().iter().sum();
        assert_eq!(total, BigRational::new(BigInt::from(want.0), BigInt::from(want.1)), "D = {d}");
    }
}

#[test]
fn interpolation_exponents_sqrt5() {
    let k = make_field(5).unwrap();
    let f = IdealHNF::principal(&k, &parse_element(&k, "sqrt5").unwrap());
    let md = build_modulus(&k, &f, TraceScaling::None).unwrap();
    let chi = Character::trivial(md.len());
    let tw = common_twist(&k, &[&md], 5, None).unwrap();
    for h in 2..=3u32 {
        let lv = Level::new(5, h, h, 10).unwrap();
        let z = chi_series(&k, &md, &chi, &tw, &lv).unwrap();
        for c in interpolation_checks(&k, &md, &chi, &tw, &lv, &z, &[4, 8]).unwrap() {
            assert_eq!(c.padic_agreement_exponent, h + 1, "h = {h}, m = {}", c.m);
        }
    }
}
