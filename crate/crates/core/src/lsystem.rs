//! L-system genotypes: a three-rule grammar over a turtle-style alphabet.
//!
//! A genotype is a tuple (alphabet, axiom, rules). The axiom is always the
//! single core symbol; one production rule exists per rewritable symbol
//! (core, brick, joint). Joint symbols carry their oscillator parameters, so
//! the same grammar encodes both morphology and controller.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::controller::OscillatorParams;

/// One symbol of the grammar alphabet.
///
/// `Core`, `Brick` and `Joint` are rewritable module symbols; the turn and
/// bracket symbols are terminals interpreted by the body decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolToken {
    Core,
    Brick,
    Joint(OscillatorParams),
    TurnLeft,
    TurnRight,
    PushBranch,
    PopBranch,
}

impl SymbolToken {
    pub fn is_core(&self) -> bool {
        matches!(self, SymbolToken::Core)
    }
}

impl fmt::Display for SymbolToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolToken::Core => write!(f, "C"),
            SymbolToken::Brick => write!(f, "B"),
            SymbolToken::Joint(p) => {
                write!(f, "J({:.2},{:.2},{:.2})", p.amplitude, p.period, p.phase)
            }
            SymbolToken::TurnLeft => write!(f, "l"),
            SymbolToken::TurnRight => write!(f, "r"),
            SymbolToken::PushBranch => write!(f, "["),
            SymbolToken::PopBranch => write!(f, "]"),
        }
    }
}

/// Left-hand side of a production rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predecessor {
    Core,
    Brick,
    Joint,
}

impl Predecessor {
    pub const ALL: [Predecessor; 3] = [Predecessor::Core, Predecessor::Brick, Predecessor::Joint];

    fn letter(&self) -> char {
        match self {
            Predecessor::Core => 'C',
            Predecessor::Brick => 'B',
            Predecessor::Joint => 'J',
        }
    }
}

/// A single production rule `predecessor -> replacement`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionRule {
    pub predecessor: Predecessor,
    pub replacement: Vec<SymbolToken>,
}

/// The full grammar: exactly one rule per predecessor, axiom fixed to `[C]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    rules: [ProductionRule; 3],
}

/// Rewrite settings: number of parallel rewriting passes and the token cap
/// applied to the expanded string.
#[derive(Debug, Clone, Copy)]
pub struct RewriteConfig {
    pub iterations: u32,
    pub max_string_length: usize,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            max_string_length: 1000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenotypeError {
    #[error("rule for {0:?} is empty")]
    EmptyReplacement(Predecessor),
    #[error("core rule must contain exactly one core token, at position 0")]
    BadCorePlacement,
    #[error("rule for {0:?} must not contain a core token")]
    CoreInNonCoreRule(Predecessor),
    #[error("unbalanced brackets in rule for {0:?}")]
    UnbalancedBrackets(Predecessor),
    #[error("joint parameters out of range in rule for {0:?}")]
    ParamsOutOfRange(Predecessor),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Genotype {
    /// Builds a genotype from one rule per predecessor, validating all
    /// invariants.
    pub fn new(
        core: Vec<SymbolToken>,
        brick: Vec<SymbolToken>,
        joint: Vec<SymbolToken>,
    ) -> Result<Self, GenotypeError> {
        let g = Self {
            rules: [
                ProductionRule {
                    predecessor: Predecessor::Core,
                    replacement: core,
                },
                ProductionRule {
                    predecessor: Predecessor::Brick,
                    replacement: brick,
                },
                ProductionRule {
                    predecessor: Predecessor::Joint,
                    replacement: joint,
                },
            ],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn rule(&self, p: Predecessor) -> &ProductionRule {
        &self.rules[p as usize]
    }

    pub fn rules(&self) -> &[ProductionRule; 3] {
        &self.rules
    }

    /// The immutable axiom: a single core token.
    pub fn axiom() -> Vec<SymbolToken> {
        vec![SymbolToken::Core]
    }

    /// Checks every type invariant; `Ok(())` iff the genotype is well formed.
    pub fn validate(&self) -> Result<(), GenotypeError> {
        for rule in &self.rules {
            let pred = rule.predecessor;
            if rule.replacement.is_empty() {
                return Err(GenotypeError::EmptyReplacement(pred));
            }
            let cores = rule.replacement.iter().filter(|t| t.is_core()).count();
            match pred {
                Predecessor::Core => {
                    if cores != 1 || !rule.replacement[0].is_core() {
                        return Err(GenotypeError::BadCorePlacement);
                    }
                }
                _ => {
                    if cores != 0 {
                        return Err(GenotypeError::CoreInNonCoreRule(pred));
                    }
                }
            }
            if !brackets_balanced(&rule.replacement) {
                return Err(GenotypeError::UnbalancedBrackets(pred));
            }
            for tok in &rule.replacement {
                if let SymbolToken::Joint(p) = tok {
                    if !p.in_range() {
                        return Err(GenotypeError::ParamsOutOfRange(pred));
                    }
                }
            }
        }
        Ok(())
    }
}

fn brackets_balanced(tokens: &[SymbolToken]) -> bool {
    let mut depth = 0i64;
    for t in tokens {
        match t {
            SymbolToken::PushBranch => depth += 1,
            SymbolToken::PopBranch => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Joint parameters sampled on the centesimal grid so that the 2-decimal
/// text serialization round-trips exactly.
pub fn random_params(rng: &mut ChaCha8Rng) -> OscillatorParams {
    OscillatorParams::new(
        rng.gen_range(0..=100) as f64 / 100.0,
        rng.gen_range(100..=1000) as f64 / 100.0,
        rng.gen_range(0..100) as f64 / 100.0,
    )
}

fn random_plain_token(rng: &mut ChaCha8Rng) -> SymbolToken {
    match rng.gen_range(0..4) {
        0 => SymbolToken::Brick,
        1 => SymbolToken::Joint(random_params(rng)),
        2 => SymbolToken::TurnLeft,
        _ => SymbolToken::TurnRight,
    }
}

fn random_replacement(rng: &mut ChaCha8Rng, pred: Predecessor) -> Vec<SymbolToken> {
    let len = rng.gen_range(2..=6usize);
    let mut tokens = Vec::with_capacity(len);
    if pred == Predecessor::Core {
        tokens.push(SymbolToken::Core);
    }
    // Reserve two slots for a bracket pair around a suffix of the generated
    // word; only possible when at least one token fits inside.
    let wrap = rng.gen_bool(0.2) && len - tokens.len() >= 3;
    let fill = len - tokens.len() - if wrap { 2 } else { 0 };
    let base = tokens.len();
    for _ in 0..fill {
        tokens.push(random_plain_token(rng));
    }
    if wrap {
        let start = base + rng.gen_range(0..fill);
        tokens.insert(start, SymbolToken::PushBranch);
        tokens.push(SymbolToken::PopBranch);
    }
    tokens
}

/// Samples a fresh valid genotype. Replacement words have total length
/// uniform in `[2, 6]`.
pub fn random_genotype(rng: &mut ChaCha8Rng) -> Genotype {
    let g = Genotype {
        rules: [
            ProductionRule {
                predecessor: Predecessor::Core,
                replacement: random_replacement(rng, Predecessor::Core),
            },
            ProductionRule {
                predecessor: Predecessor::Brick,
                replacement: random_replacement(rng, Predecessor::Brick),
            },
            ProductionRule {
                predecessor: Predecessor::Joint,
                replacement: random_replacement(rng, Predecessor::Joint),
            },
        ],
    };
    debug_assert!(g.validate().is_ok());
    g
}

/// Expands the axiom by parallel rewriting.
///
/// Every rewritable token is replaced simultaneously in each iteration;
/// turns and brackets are terminals. The result is truncated to
/// `max_string_length` tokens and unmatched opening brackets produced by the
/// truncation are dropped, so the output is always bracket-balanced.
pub fn rewrite(g: &Genotype, cfg: &RewriteConfig) -> Vec<SymbolToken> {
    let mut current = Genotype::axiom();
    for _ in 0..cfg.iterations {
        let mut next = Vec::with_capacity(current.len() * 2);
        for tok in &current {
            match tok {
                SymbolToken::Core => next.extend_from_slice(&g.rule(Predecessor::Core).replacement),
                SymbolToken::Brick => {
                    next.extend_from_slice(&g.rule(Predecessor::Brick).replacement)
                }
                SymbolToken::Joint(_) => {
                    next.extend_from_slice(&g.rule(Predecessor::Joint).replacement)
                }
                terminal => next.push(*terminal),
            }
            if next.len() >= cfg.max_string_length {
                break;
            }
        }
        next.truncate(cfg.max_string_length);
        current = next;
    }
    current.truncate(cfg.max_string_length);
    strip_unmatched_brackets(&mut current);
    current
}

/// Removes unmatched pop tokens and leftover push tokens in place.
fn strip_unmatched_brackets(tokens: &mut Vec<SymbolToken>) {
    let mut keep = vec![true; tokens.len()];
    let mut stack = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match t {
            SymbolToken::PushBranch => stack.push(i),
            SymbolToken::PopBranch => keep[i] = stack.pop().is_some(),
            _ => {}
        }
    }
    for i in stack {
        keep[i] = false;
    }
    if keep.iter().any(|k| !k) {
        let mut idx = 0;
        tokens.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum MutationOp {
    Add { position: usize, token_choice: u8 },
    Delete { position: usize },
    Swap { a: usize, b: usize },
}

fn token_from_choice(choice: u8, rng: &mut ChaCha8Rng) -> SymbolToken {
    match choice {
        0 => SymbolToken::Core,
        1 => SymbolToken::Brick,
        2 => SymbolToken::Joint(random_params(rng)),
        3 => SymbolToken::TurnLeft,
        4 => SymbolToken::TurnRight,
        5 => SymbolToken::PushBranch,
        _ => SymbolToken::PopBranch,
    }
}

fn core_placement_ok(pred: Predecessor, tokens: &[SymbolToken]) -> bool {
    let cores = tokens.iter().filter(|t| t.is_core()).count();
    match pred {
        Predecessor::Core => cores == 1 && tokens.first().is_some_and(|t| t.is_core()),
        _ => cores == 0,
    }
}

/// Applies one raw edit to a replacement word, then repairs it: an illegal
/// core change reverts the whole edit, unmatched brackets are removed, and an
/// edit that would empty the word reverts.
fn apply_mutation_op(
    pred: Predecessor,
    replacement: &[SymbolToken],
    op: MutationOp,
    rng: &mut ChaCha8Rng,
) -> Vec<SymbolToken> {
    let mut out = replacement.to_vec();
    match op {
        MutationOp::Add {
            position,
            token_choice,
        } => {
            let tok = token_from_choice(token_choice, rng);
            out.insert(position.min(out.len()), tok);
        }
        MutationOp::Delete { position } => {
            if out.len() <= 1 {
                return out;
            }
            out.remove(position.min(out.len() - 1));
        }
        MutationOp::Swap { a, b } => {
            if a != b && a < out.len() && b < out.len() {
                out.swap(a, b);
            }
        }
    }
    if !core_placement_ok(pred, &out) {
        return replacement.to_vec();
    }
    let mut repaired = out;
    repair_brackets(&mut repaired);
    if repaired.is_empty() {
        return replacement.to_vec();
    }
    repaired
}

fn repair_brackets(tokens: &mut Vec<SymbolToken>) {
    let mut v = std::mem::take(tokens);
    strip_unmatched_brackets(&mut v);
    *tokens = v;
}

/// Mutates one uniformly chosen rule with one uniformly chosen edit
/// (add, delete or swap of a single token), followed by the repair pass.
pub fn mutate(g: &Genotype, rng: &mut ChaCha8Rng) -> Genotype {
    let rule_idx = rng.gen_range(0..3usize);
    let pred = Predecessor::ALL[rule_idx];
    let len = g.rules[rule_idx].replacement.len();
    let op = match rng.gen_range(0..3u8) {
        0 => MutationOp::Add {
            position: rng.gen_range(0..=len),
            token_choice: rng.gen_range(0..7u8),
        },
        1 => MutationOp::Delete {
            position: rng.gen_range(0..len),
        },
        _ => MutationOp::Swap {
            a: rng.gen_range(0..len),
            b: rng.gen_range(0..len),
        },
    };
    let mut out = g.clone();
    out.rules[rule_idx].replacement =
        apply_mutation_op(pred, &g.rules[rule_idx].replacement, op, rng);
    debug_assert!(out.validate().is_ok());
    out
}

/// Uniform rule-level crossover: each of the child's three rules is copied
/// whole from either parent with probability 1/2.
pub fn crossover(p1: &Genotype, p2: &Genotype, rng: &mut ChaCha8Rng) -> Genotype {
    let pick = |rng: &mut ChaCha8Rng, i: usize| {
        if rng.gen_bool(0.5) {
            p1.rules[i].clone()
        } else {
            p2.rules[i].clone()
        }
    };
    let rules = [pick(rng, 0), pick(rng, 1), pick(rng, 2)];
    Genotype { rules }
}

impl fmt::Display for Genotype {
    /// One rule per line: `C -> C [ l J(0.50,2.00,0.25) ] B`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rule) in self.rules.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} ->", rule.predecessor.letter())?;
            for tok in &rule.replacement {
                write!(f, " {tok}")?;
            }
        }
        Ok(())
    }
}

fn parse_token(word: &str, line: usize) -> Result<SymbolToken, GenotypeError> {
    match word {
        "C" => Ok(SymbolToken::Core),
        "B" => Ok(SymbolToken::Brick),
        "l" => Ok(SymbolToken::TurnLeft),
        "r" => Ok(SymbolToken::TurnRight),
        "[" => Ok(SymbolToken::PushBranch),
        "]" => Ok(SymbolToken::PopBranch),
        _ => {
            let inner = word
                .strip_prefix("J(")
                .and_then(|w| w.strip_suffix(')'))
                .ok_or_else(|| GenotypeError::Parse {
                    line,
                    msg: format!("unrecognized token `{word}`"),
                })?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(GenotypeError::Parse {
                    line,
                    msg: format!("joint token needs 3 parameters, got `{word}`"),
                });
            }
            let mut vals = [0.0f64; 3];
            for (v, part) in vals.iter_mut().zip(&parts) {
                *v = part.trim().parse().map_err(|_| GenotypeError::Parse {
                    line,
                    msg: format!("bad joint parameter `{part}`"),
                })?;
            }
            Ok(SymbolToken::Joint(OscillatorParams {
                amplitude: vals[0],
                period: vals[1],
                phase: vals[2],
            }))
        }
    }
}

impl std::str::FromStr for Genotype {
    type Err = GenotypeError;

    /// Parses the one-rule-per-line serialization. Parameters are stored as
    /// printed, so print/parse round-trips are exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rules: [Option<Vec<SymbolToken>>; 3] = [None, None, None];
        for (n, raw) in s.lines().enumerate() {
            let line = n + 1;
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            let (lhs, rhs) = text.split_once("->").ok_or_else(|| GenotypeError::Parse {
                line,
                msg: "expected `PRED -> tokens`".into(),
            })?;
            let pred = match lhs.trim() {
                "C" => Predecessor::Core,
                "B" => Predecessor::Brick,
                "J" => Predecessor::Joint,
                other => {
                    return Err(GenotypeError::Parse {
                        line,
                        msg: format!("unknown predecessor `{other}`"),
                    })
                }
            };
            if rules[pred as usize].is_some() {
                return Err(GenotypeError::Parse {
                    line,
                    msg: format!("duplicate rule for {}", pred.letter()),
                });
            }
            let tokens = rhs
                .split_whitespace()
                .map(|w| parse_token(w, line))
                .collect::<Result<Vec<_>, _>>()?;
            rules[pred as usize] = Some(tokens);
        }
        let [core, brick, joint] = rules;
        let missing = |p: Predecessor| GenotypeError::Parse {
            line: 0,
            msg: format!("missing rule for {}", p.letter()),
        };
        Genotype::new(
            core.ok_or_else(|| missing(Predecessor::Core))?,
            brick.ok_or_else(|| missing(Predecessor::Brick))?,
            joint.ok_or_else(|| missing(Predecessor::Joint))?,
        )
    }
}

/// Convenience constructor used across tests: parses a compact rule body such
/// as `"C B [ l J(0.50,2.00,0.25) ]"`.
pub fn tokens(text: &str) -> Vec<SymbolToken> {
    text.split_whitespace()
        .map(|w| parse_token(w, 0).expect("bad token literal"))
        .collect()
}
