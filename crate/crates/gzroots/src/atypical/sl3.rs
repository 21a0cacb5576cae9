//! sl(3) specifics: which divergence case a state falls in, the rotation
//! angle of each case, and the closed-form actions on modified states.
//!
//! Rows of level 2 are written `(p12, p22)` and their gap is `p12 - p22`.
//! A rotated pair consists of two rows whose gaps sit at `beta m - 1` and
//! `beta m + 1`; the same pair is reached from a case (a) state (gap
//! `beta m`), from its lower member (case b) or from its upper member (case c).

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::AtypicalError;
use crate::genrep::{lowering_arguments, Direction};
use crate::gzbasis::GZPattern;
use crate::qarith::{q_bracket, sqrt_signed_product, QPoint, UnityOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    /// `p12 - p22 = beta m`
    A,
    /// `p12 - p22 + 1 = beta m`
    B,
    /// `p12 - p22 - 1 = beta m`
    C,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
        })
    }
}

/// Divergence case of a primitive sl(3) state, `None` when `f_2` is finite on it.
///
/// Requires no vanishing numerator factors in `f_2`: `p_i3 - p_j2 + 1` and
/// `p_i2 - p11` must not be nonzero multiples of `m`.
pub fn detect_case_sl3(p: &GZPattern, m: UnityOrder) -> Result<Option<Case>, AtypicalError> {
    if p.rank() != 3 {
        return Err(AtypicalError::RankUnsupported(p.rank()));
    }
    // a zero difference marks a transition out of the module, not a root cancellation
    let soft = |v: i64| v != 0 && m.divides(v);
    for i in 1..=3 {
        for j in 1..=2 {
            if soft(p.entry(i, 3) - p.entry(j, 2) + 1) {
                return Err(AtypicalError::PreconditionViolated {
                    pattern: p.clone(),
                    reason: format!("p_{i}3 - p_{j}2 + 1 vanishes modulo {m}"),
                });
            }
        }
    }
    for i in 1..=2 {
        if soft(p.entry(i, 2) - p.entry(1, 1)) {
            return Err(AtypicalError::PreconditionViolated {
                pattern: p.clone(),
                reason: format!("p_{i}2 - p_11 vanishes modulo {m}"),
            });
        }
    }
    let gap = p.entry(1, 2) - p.entry(2, 2);
    let fires = |shift: i64| gap + shift >= m.as_i64() && m.divides(gap + shift);
    let hits: Vec<Case> = [(0, Case::A), (1, Case::B), (-1, Case::C)]
        .into_iter()
        .filter(|&(shift, _)| fires(shift))
        .map(|(_, c)| c)
        .collect();
    assert!(hits.len() <= 1, "several divergence cases fire on {p}");
    Ok(hits.first().copied())
}

/// The 2x2 rotation `[[cos, sin], [-sin, cos]]` of one case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisRotation {
    pub case: Case,
    pub gap: i64,
    pub cos: Complex64,
    pub sin: Complex64,
}

impl BasisRotation {
    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.cos, self.sin, -self.sin, self.cos)
    }

    /// The rotation by the opposite angle.
    pub fn inverse(&self) -> Self {
        Self {
            sin: -self.sin,
            ..*self
        }
    }

    /// Largest entry of `D^T D - 1` and `D D^T - 1`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.matrix();
        let id = Matrix2::identity();
        let a = (d.transpose() * d - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let b = (d * d.transpose() - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.max(b)
    }
}

/// Bracket arguments `(cos numerator, sin numerator, shared center)` of each case.
fn angle_arguments(case: Case, gap: i64) -> (i64, i64, i64) {
    match case {
        Case::A => (gap - 1, gap + 1, gap),
        Case::B => (gap, gap + 2, gap + 1),
        Case::C => (gap, gap - 2, gap - 1),
    }
}

/// `cos^2 = [x] / ([2][c])`, `sin^2 = [y] / ([2][c])` with `(x, y, c)` per case;
/// `gap` plays the role of the formal parameter.
pub fn rotation_sl3(case: Case, gap: i64, q: &QPoint) -> Result<BasisRotation, AtypicalError> {
    let (x, y, center) = angle_arguments(case, gap);
    if q.bracket_vanishes(center) || q.bracket_vanishes(2) {
        return Err(AtypicalError::FormalAngle { case, gap });
    }
    let den = sqrt_signed_product(&[q_bracket(2, q), q_bracket(center, q)]);
    Ok(BasisRotation {
        case,
        gap,
        cos: sqrt_signed_product(&[q_bracket(x, q)]) / den,
        sin: sqrt_signed_product(&[q_bracket(y, q)]) / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Primitive,
    /// Member of a rotated pair, tagged with the case whose rotation defined it.
    Modified(Case),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModifiedState {
    pub pattern: GZPattern,
    pub flavor: Flavor,
}

impl ModifiedState {
    pub fn primitive(pattern: GZPattern) -> Self {
        Self {
            pattern,
            flavor: Flavor::Primitive,
        }
    }

    pub fn modified(pattern: GZPattern, case: Case) -> Self {
        Self {
            pattern,
            flavor: Flavor::Modified(case),
        }
    }
}

impl fmt::Display for ModifiedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::Primitive => write!(f, "|{}>", self.pattern),
            Flavor::Modified(c) => write!(f, "||{}>({c})", self.pattern),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedTerm {
    pub source: ModifiedState,
    pub target: ModifiedState,
    pub coefficient: Complex64,
}

/// Entries of a sl(3) pattern by name.
#[derive(Clone, Copy)]
struct Entries {
    p13: i64,
    p23: i64,
    p33: i64,
    p12: i64,
    p22: i64,
    p11: i64,
}

impl Entries {
    fn of(p: &GZPattern) -> Self {
        Self {
            p13: p.entry(1, 3),
            p23: p.entry(2, 3),
            p33: p.entry(3, 3),
            p12: p.entry(1, 2),
            p22: p.entry(2, 2),
            p11: p.entry(1, 1),
        }
    }

    /// Pattern with row 2 and `p11` replaced.
    fn pattern(&self, p12: i64, p22: i64, p11: i64) -> GZPattern {
        GZPattern::from_rows(vec![vec![self.p13, self.p23, self.p33], vec![p12, p22], vec![p11]])
            .expect("sl(3) shape")
    }
}

enum Closed {
    Zero,
    Value(Complex64),
    Singular,
}

/// `prod [n]^(1/2) / prod [d]^(1/2)`, each root taken factor by factor.
fn closed_form(num: &[i64], den: &[i64], q: &QPoint) -> Closed {
    if num.iter().any(|&n| q.bracket_vanishes(n)) {
        return Closed::Zero;
    }
    if den.iter().any(|&n| q.bracket_vanishes(n)) {
        return Closed::Singular;
    }
    let top: Vec<_> = num.iter().map(|&n| q_bracket(n, q)).collect();
    let bottom: Vec<_> = den.iter().map(|&n| q_bracket(n, q)).collect();
    Closed::Value(sqrt_signed_product(&top) / sqrt_signed_product(&bottom))
}

struct Rule {
    num: Vec<i64>,
    den: Vec<i64>,
    /// Factor outside the square roots.
    outer: Complex64,
    target: ModifiedState,
}

fn rule(num: Vec<i64>, den: Vec<i64>, target: ModifiedState) -> Rule {
    Rule {
        num,
        den,
        outer: Complex64::new(1.0, 0.0),
        target,
    }
}

fn lowering_rules(
    state: &ModifiedState,
    l: usize,
    q: &QPoint,
    m: UnityOrder,
) -> Result<Vec<Rule>, AtypicalError> {
    let unknown = || AtypicalError::UnknownCase {
        state: state.clone(),
        l,
        direction: Direction::Lower,
    };
    let e = Entries::of(&state.pattern);
    let gap = e.p12 - e.p22;
    let below_center = m.divides(gap + 1);
    let above_center = m.divides(gap - 1);
    let mi = m.as_i64();
    match (state.flavor, l) {
        (Flavor::Primitive, 2) => match detect_case_sl3(&state.pattern, m) {
            Ok(Some(Case::A)) => Ok(vec![rule(
                vec![
                    2,
                    e.p13 - e.p22 + 1,
                    e.p23 - e.p22 + 1,
                    e.p22 - e.p33 - 1,
                    e.p11 - e.p22,
                ],
                vec![gap - 1, gap + 1],
                ModifiedState::modified(e.pattern(e.p12, e.p22 - 1, e.p11), Case::A),
            )]),
            _ => Err(unknown()),
        },
        (Flavor::Modified(case), 1) => {
            // parent row (P12, P22) sits at the center gap
            if below_center {
                let (pp12, pp22) = (e.p12 + 1, e.p22);
                if e.p11 != pp22 + 1 {
                    Ok(vec![rule(
                        vec![pp12 - e.p11, e.p11 - pp22 - 1],
                        vec![],
                        ModifiedState::modified(e.pattern(e.p12, e.p22, e.p11 - 1), case),
                    )])
                } else {
                    Ok(vec![Rule {
                        num: vec![mi + 1],
                        den: vec![2],
                        outer: Complex64::new(q_bracket(mi - 1, q).value, 0.0),
                        target: ModifiedState::primitive(e.pattern(pp12, pp22 - 1, e.p11 - 1)),
                    }])
                }
            } else if above_center {
                let (pp12, pp22) = (e.p12, e.p22 + 1);
                if e.p11 != pp22 + 1 {
                    Ok(vec![rule(
                        vec![pp12 - e.p11 + 1, e.p11 - pp22],
                        vec![],
                        ModifiedState::modified(e.pattern(e.p12, e.p22, e.p11 - 1), case),
                    )])
                } else {
                    Ok(vec![rule(
                        vec![mi - 1],
                        vec![2],
                        ModifiedState::primitive(e.pattern(e.p12, e.p22, e.p11 - 1)),
                    )])
                }
            } else {
                Err(unknown())
            }
        }
        (Flavor::Modified(Case::A | Case::B), 2) => {
            if below_center {
                // case (b) state ||p12 p22>
                Ok(vec![rule(
                    vec![
                        e.p13 - e.p12 + 1,
                        e.p12 - e.p23 - 1,
                        e.p12 - e.p33 - 1,
                        e.p12 - e.p11,
                    ],
                    vec![gap, gap - 1],
                    ModifiedState::modified(e.pattern(e.p12 - 1, e.p22, e.p11), Case::B),
                )])
            } else if above_center {
                // partner ||p12+1 p22-1> of the case (b) state (p12, p22)
                let (p12, p22) = (e.p12 - 1, e.p22 + 1);
                let d = p12 - p22;
                Ok(vec![
                    rule(
                        vec![
                            e.p13 - p22 + 2,
                            e.p23 - p22 + 2,
                            p22 - e.p33 - 2,
                            e.p11 - p22 + 1,
                        ],
                        vec![d + 2, d + 3],
                        ModifiedState::modified(e.pattern(p12 + 1, p22 - 2, e.p11), Case::B),
                    ),
                    rule(
                        vec![
                            2,
                            e.p13 - p22 + 1,
                            e.p23 - p22 + 1,
                            p22 - e.p33 - 1,
                            e.p11 - p22,
                        ],
                        vec![d, d + 2],
                        ModifiedState::primitive(e.pattern(p12, p22 - 1, e.p11)),
                    ),
                ])
            } else {
                Err(unknown())
            }
        }
        (Flavor::Modified(Case::C), 2) => {
            if above_center {
                // case (c) state ||p12 p22>
                Ok(vec![rule(
                    vec![
                        e.p13 - e.p12 + 1,
                        e.p12 - e.p23 - 1,
                        e.p12 - e.p33 - 1,
                        e.p12 - e.p11,
                    ],
                    vec![gap, gap + 1],
                    ModifiedState::modified(e.pattern(e.p12, e.p22 - 1, e.p11), Case::C),
                )])
            } else if below_center {
                // partner ||p12-1 p22+1> of the case (c) state (p12, p22)
                let (p12, p22) = (e.p12 + 1, e.p22 - 1);
                let d = p12 - p22;
                Ok(vec![
                    rule(
                        vec![
                            e.p13 - p22 + 1,
                            e.p23 - p22 + 1,
                            p22 - e.p33 - 1,
                            e.p11 - p22,
                        ],
                        vec![d, d + 1],
                        ModifiedState::modified(e.pattern(p12 - 2, p22 + 1, e.p11), Case::C),
                    ),
                    rule(
                        vec![
                            2,
                            e.p13 - p12 + 1,
                            p12 - e.p23 - 1,
                            p12 - e.p33 - 1,
                            p12 - e.p11,
                        ],
                        vec![d, d - 2],
                        ModifiedState::primitive(e.pattern(p12 - 1, p22, e.p11)),
                    ),
                ])
            } else {
                Err(unknown())
            }
        }
        _ => Err(unknown()),
    }
}

/// Closed-form action of `f_l` (lower) or `e_l` (raise) on a state of the
/// modified sl(3) basis, evaluated at the root with `[n + beta m] = [n]`.
///
/// Raising coefficients mirror the lowering ones: the coefficient of `e_l`
/// from `x` onto `y` is that of `f_l` from `y` onto `x`.
pub fn modified_ladder_sl3(
    state: &ModifiedState,
    l: usize,
    direction: Direction,
    q: &QPoint,
    m: UnityOrder,
) -> Result<Vec<ModifiedTerm>, AtypicalError> {
    if state.pattern.rank() != 3 {
        return Err(AtypicalError::RankUnsupported(state.pattern.rank()));
    }
    match direction {
        Direction::Lower => {
            let mut out = Vec::new();
            for r in lowering_rules(state, l, q, m)? {
                match closed_form(&r.num, &r.den, q) {
                    Closed::Zero => {}
                    Closed::Singular => {
                        return Err(AtypicalError::SingularClosedForm {
                            state: state.clone(),
                            l,
                        })
                    }
                    Closed::Value(v) => {
                        let coefficient = v * r.outer;
                        if coefficient != Complex64::new(0.0, 0.0) {
                            out.push(ModifiedTerm {
                                source: state.clone(),
                                target: r.target,
                                coefficient,
                            });
                        }
                    }
                }
            }
            Ok(out)
        }
        Direction::Raise => {
            let e = Entries::of(&state.pattern);
            let flavors = [
                Flavor::Primitive,
                Flavor::Modified(Case::A),
                Flavor::Modified(Case::B),
                Flavor::Modified(Case::C),
            ];
            let mut out: Vec<ModifiedTerm> = Vec::new();
            let mut matched = false;
            for d12 in -1..=1 {
                for d22 in -1..=1 {
                    for d11 in -1..=1 {
                        let pattern = e.pattern(e.p12 + d12, e.p22 + d22, e.p11 + d11);
                        if !crate::gzbasis::validate_pattern(&pattern) {
                            continue;
                        }
                        for flavor in flavors {
                            let source = ModifiedState {
                                pattern: pattern.clone(),
                                flavor,
                            };
                            let Ok(terms) = modified_ladder_sl3(&source, l, Direction::Lower, q, m) else {
                                continue;
                            };
                            matched = true;
                            for t in terms.into_iter().filter(|t| t.target == *state) {
                                if !out.iter().any(|o| o.target == source) {
                                    out.push(ModifiedTerm {
                                        source: state.clone(),
                                        target: source.clone(),
                                        coefficient: t.coefficient,
                                    });
                                }
                            }
                        }
                    }
                }
            }
            if matched {
                Ok(out)
            } else {
                Err(AtypicalError::UnknownCase {
                    state: state.clone(),
                    l,
                    direction,
                })
            }
        }
    }
}

/// Bracket arguments of the primitive `f_2` coefficient onto `p12 - 1` (index 0)
/// and `p22 - 1` (index 1), as `(numerator, denominator)`.
pub fn primitive_f2_arguments(p: &GZPattern) -> [(Vec<i64>, Vec<i64>); 2] {
    [1, 2].map(|j| {
        let [a, b, c] = lowering_arguments(p, j, 2);
        (a.into_iter().chain(b).collect(), c)
    })
}
