//! Generator for the reduplication grammar over `T` surface tiers.
//!
//! Every time slice is spelled as `T` surface symbols, `T` underlying
//! symbols, `T` reduplicant-level symbols, then one symbol each for INS, DEL,
//! RDEL, RED and BASE, matching the reduplicative tier layout.
//!
//! `Rd1` has arity 3. In the reduplicant-first direction its components are
//! the first reduplicant slice, the slice shared by the end of the reduplicant
//! and the start of the base, and the last base slice; `Rd2` threads the
//! interior slices of the two spans in parallel. `Rd` concatenates all three
//! components, so each of them is used exactly once.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::grammar::{Category, GrammarError, GrammarLimits, Mcfg, McfgRule, Term};
use crate::otp::tier::TierInventory;
use crate::symbol::Mark;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ReduplicantFirst,
    BaseFirst,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RedupError {
    #[error("the reduplication grammar needs a reduplicative tier inventory with at least one surface tier")]
    NotReduplicative,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Right-hand side item: a terminal mark or a component reference.
#[derive(Clone, Copy)]
enum It<'a> {
    M(Mark),
    C(&'a Category, usize),
}

fn seq(items: &[It]) -> Vec<Term> {
    items
        .iter()
        .map(|it| match *it {
            It::M(m) => Term::Sym(m.symbol()),
            It::C(c, k) => Term::comp(c, k),
        })
        .collect()
}

pub fn gen_redup_grammar(inventory: &TierInventory, direction: Direction) -> Result<Mcfg, RedupError> {
    let tiers = inventory.surface_count().ok_or(RedupError::NotReduplicative)?;
    gen_for_tiers(tiers, direction)
}

/// The grammar for `tiers` surface tiers.
pub fn gen_for_tiers(tiers: usize, direction: Direction) -> Result<Mcfg, RedupError> {
    use It::{C, M};
    if tiers == 0 {
        return Err(RedupError::NotReduplicative);
    }
    let cat = |n: &str, k: usize| Category::new(n, k);
    let (s, non, ssr, ur, mrd, a) = (
        cat("S", 1),
        cat("Non", 1),
        cat("SSR", 1),
        cat("UR", 1),
        cat("MRD", 1),
        cat("A", 1),
    );
    let (rd, rd1, rd2) = (cat("Rd", 1), cat("Rd1", 3), cat("Rd2", 2));
    let (bdr, bdl, b) = (cat("BDR", 2), cat("BDL", 2), cat("B", 2));
    let flag = |n: &str| cat(n, 1);
    let (nbr, rle, rre, ble, bre) = (flag("NBR"), flag("RLE"), flag("RRE"), flag("BLE"), flag("BRE"));
    let (rb, br, red, bas) = (flag("RB"), flag("BR"), flag("RED"), flag("BAS"));

    let mut rules: Vec<McfgRule> = Vec::new();
    let mut rule = |lhs: &Category, comps: &[&[It]]| {
        rules.push(McfgRule::new(lhs.clone(), comps.iter().map(|c| seq(c)).collect(), 0));
    };

    rule(&s, &[&[C(&non, 0), C(&rd, 0), C(&non, 0)]]);
    rule(&s, &[&[C(&rd, 0), C(&non, 0)]]);
    rule(&s, &[&[C(&non, 0), C(&rd, 0)]]);
    rule(&s, &[&[C(&rd, 0)]]);
    rule(&non, &[&[C(&ssr, 0), C(&ur, 0), C(&mrd, 0), C(&nbr, 0)]]);
    rule(&non, &[&[C(&non, 0), C(&ssr, 0), C(&ur, 0), C(&mrd, 0), C(&nbr, 0)]]);
    let copies = vec![C(&a, 0); tiers];
    rule(&ssr, &[&copies]);
    rule(&ur, &[&copies]);
    rule(&mrd, &[&vec![M(Mark::Out); tiers]]);
    rule(&rd, &[&[C(&rd1, 0), C(&rd1, 1), C(&rd1, 2)]]);

    // Tuple categories spanning all tiers, from one pair category per tier.
    let per_tier =
        |prefix: &str| -> Vec<Category> { (0..tiers).map(|n| cat(&alloc::format!("{prefix}{n}"), 2)).collect() };
    let (bdr_n, bdl_n, b_n) = (per_tier("BDR"), per_tier("BDL"), per_tier("B"));
    for (whole, parts) in [(&bdr, &bdr_n), (&bdl, &bdl_n), (&b, &b_n)] {
        let first: Vec<It> = parts.iter().map(|p| C(p, 0)).collect();
        let second: Vec<It> = parts.iter().map(|p| C(p, 1)).collect();
        rule(whole, &[&first, &second]);
    }
    for m in Mark::ALL {
        rule(&a, &[&[M(m)]]);
    }

    // Surface mark paired with what the reduplicant level receives.
    use Mark::{Boundary as P, Close as R, In as I, Open as L, Out as O};
    type Pairs<'a> = (&'a [Category], [(Mark, Mark); 5]);
    let pairs: [Pairs; 3] = [
        (&bdr_n, [(O, O), (I, I), (L, L), (R, O), (P, L)]),
        (&bdl_n, [(O, O), (I, I), (L, O), (R, R), (P, R)]),
        (&b_n, [(O, O), (I, I), (L, L), (R, R), (P, P)]),
    ];
    for (cats, alts) in &pairs {
        for c in cats.iter() {
            for (x, y) in alts {
                rule(c, &[&[M(*x)], &[M(*y)]]);
            }
        }
    }

    // INS DEL RDEL RED BASE.
    let any = C(&a, 0);
    let flags: [(&Category, [It; 5]); 9] = [
        (&nbr, [any, any, M(O), M(O), M(O)]),
        (&rle, [any, any, M(O), M(L), M(O)]),
        (&rre, [any, any, M(O), M(R), M(O)]),
        (&ble, [any, any, any, M(O), M(L)]),
        (&bre, [any, any, any, M(O), M(R)]),
        (&rb, [any, any, any, M(R), M(L)]),
        (&br, [any, any, any, M(L), M(R)]),
        (&red, [any, any, M(O), M(I), M(O)]),
        (&bas, [any, any, any, M(O), M(I)]),
    ];
    for (c, items) in &flags {
        rule(c, &[items]);
    }

    let (surface, under, refr) = (C(&ssr, 0), C(&ur, 0), C(&mrd, 0));
    match direction {
        Direction::ReduplicantFirst => {
            rule(
                &rd1,
                &[
                    &[C(&bdr, 0), under, refr, C(&rle, 0), C(&rd2, 0)],
                    &[C(&bdl, 0), under, C(&bdr, 1), C(&rb, 0), C(&rd2, 1)],
                    &[surface, under, C(&bdl, 1), C(&bre, 0)],
                ],
            );
            rule(
                &rd2,
                &[
                    &[C(&b, 0), under, refr, C(&red, 0)],
                    &[surface, under, C(&b, 1), C(&bas, 0)],
                ],
            );
            rule(
                &rd2,
                &[
                    &[C(&rd2, 0), C(&b, 0), under, refr, C(&red, 0)],
                    &[C(&rd2, 1), surface, under, C(&b, 1), C(&bas, 0)],
                ],
            );
        }
        Direction::BaseFirst => {
            rule(
                &rd1,
                &[
                    &[surface, under, C(&bdr, 1), C(&ble, 0), C(&rd2, 0)],
                    &[C(&bdr, 0), under, C(&bdl, 1), C(&br, 0), C(&rd2, 1)],
                    &[C(&bdl, 0), under, refr, C(&rre, 0)],
                ],
            );
            rule(
                &rd2,
                &[
                    &[surface, under, C(&b, 1), C(&bas, 0)],
                    &[C(&b, 0), under, refr, C(&red, 0)],
                ],
            );
            rule(
                &rd2,
                &[
                    &[C(&rd2, 0), surface, under, C(&b, 1), C(&bas, 0)],
                    &[C(&rd2, 1), C(&b, 0), under, refr, C(&red, 0)],
                ],
            );
        }
    }

    let limits = GrammarLimits::default();
    Ok(Mcfg::with_categories(s, Vec::new(), rules, limits)?)
}

/// Category names of the per-tier pair categories, for documentation and tests.
pub fn pair_category_names(tiers: usize) -> Vec<String> {
    ["BDR", "BDL", "B"]
        .iter()
        .flat_map(|p| (0..tiers).map(move |n| alloc::format!("{p}{n}")))
        .collect()
}
