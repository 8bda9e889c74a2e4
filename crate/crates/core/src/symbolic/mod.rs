//! Exact-rational polynomial algebra and truncated series in ε = n^{-1/2}.

mod poly;
mod series;
mod symbol;
mod text;

pub use poly::{rat, Monomial, SymPoly};
pub use series::{substitute, GradedSeries, DEFAULT_CAP};
pub use symbol::{PsiMonomial, Symbol, MAX_PSI};
pub use text::{parse_poly, parse_series};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand for `SymPoly::var`.
pub fn var(s: Symbol) -> SymPoly {
    SymPoly::var(s)
}

#[cfg(test)]
mod proptests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;

    fn symbol() -> impl Strategy<Value = Symbol> {
        prop_oneof![
            (1u8..=3).prop_map(Symbol::xi),
            (2u8..=4).prop_map(Symbol::a),
            Just(Symbol::a2_inv()),
            (2u8..=4).prop_map(Symbol::eta),
            Just(Symbol::x()),
        ]
    }

    fn poly() -> impl Strategy<Value = SymPoly> {
        prop::collection::vec(
            (-6i64..=6, 1i64..=4, prop::collection::vec((symbol(), 1u32..=2), 0..3)),
            0..5,
        )
        .prop_map(|terms| {
            let mut p = SymPoly::zero();
            for (n, d, f) in terms {
                p.add_term(Monomial::from_pairs(f), rat(n, d));
            }
            p
        })
    }

    fn series(cap: usize) -> impl Strategy<Value = GradedSeries> {
        prop::collection::vec(poly(), cap + 1).prop_map(move |c| GradedSeries::from_coeffs(c, cap))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(p in poly(), q in poly(), r in poly()) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn no_zero_coefficients_stored(p in poly(), q in poly()) {
            let prod = &p * &q;
            prop_assert!(prod.terms().all(|(_, c)| *c != rat(0, 1)));
        }

        #[test]
        fn text_round_trip(p in poly()) {
            let text = p.to_string();
            let back = parse_poly(&text).unwrap();
            prop_assert_eq!(back.to_string(), text);
            prop_assert_eq!(back, p);
        }

        #[test]
        fn substitute_is_homomorphic(p in poly(), q in poly(), s1 in series(3), s2 in series(3)) {
            let mut sigma = BTreeMap::new();
            sigma.insert(Symbol::xi(1), s1);
            sigma.insert(Symbol::x(), s2);
            let lhs = substitute(&(&p * &q), &sigma, 3);
            let rhs = substitute(&p, &sigma, 3).mul_ref(&substitute(&q, &sigma, 3));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn truncation_commutes_with_products(s in series(4), t in series(4)) {
            let high = s.mul_ref(&t).with_cap(2);
            let low = s.with_cap(2).mul_ref(&t.with_cap(2));
            prop_assert_eq!(high, low);
        }

        #[test]
        fn series_text_round_trip(s in series(3)) {
            prop_assert_eq!(parse_series(&s.to_string(), 3).unwrap(), s);
        }
    }
}
