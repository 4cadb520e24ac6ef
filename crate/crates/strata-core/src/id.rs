//! Stable identifiers for strata and charts.
//!
//! A stratum id is the path of construction steps that produced the stratum,
//! so the same construction sequence always yields the same id and ids can be
//! ordered, hashed and serialized deterministically.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One construction step in a stratum's provenance path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Token {
    /// A named smooth piece.
    Atom(String),
    /// The vertex stratum of a cone.
    Vertex,
    /// The cone stratum lying over a link stratum.
    Body(StratumId),
    /// Product with a named manifold factor (prepended).
    Times(String),
    /// Disjoint-union component index (prepended).
    Part(u32),
    /// Suspension pole, `true` for the north pole.
    Pole(bool),
    /// Suspension stratum swept out by a link stratum.
    Swept(StratumId),
    /// Positive copy of a stratum in an unbending.
    CopyPlus,
    /// Negative copy of a stratum in an unbending.
    CopyMinus,
    /// Merged unbending class over a stratum (prepended).
    Unbent,
    /// Tube-fiber stratum of a minimal stratum's unbent tube,
    /// carrying the minimal stratum and the link stratum.
    Fiber(StratumId, StratumId),
    /// Opaque id used by the order-shuffled unbending mode.
    Anon(u32),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(name) => write!(f, "atom:{name}"),
            Token::Vertex => write!(f, "vertex"),
            Token::Body(id) => write!(f, "body({id})"),
            Token::Times(name) => write!(f, "times:{name}"),
            Token::Part(k) => write!(f, "part:{k}"),
            Token::Pole(true) => write!(f, "pole+"),
            Token::Pole(false) => write!(f, "pole-"),
            Token::Swept(id) => write!(f, "swept({id})"),
            Token::CopyPlus => write!(f, "copy+"),
            Token::CopyMinus => write!(f, "copy-"),
            Token::Unbent => write!(f, "unbent"),
            Token::Fiber(base, link) => write!(f, "fiber({base};{link})"),
            Token::Anon(k) => write!(f, "anon:{k}"),
        }
    }
}

/// Replaces the id-grammar delimiters in a free-text name so that ids
/// always round-trip through their textual form.
pub fn sanitize_label(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            '/' | '(' | ')' | ';' | ':' => '-',
            other => other,
        })
        .collect()
}

/// Identifier of a stratum: the ordered list of construction steps that
/// created it. Unique within one presented space.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StratumId(pub Vec<Token>);

impl StratumId {
    pub fn atom(name: &str) -> Self {
        StratumId(vec![Token::Atom(sanitize_label(name))])
    }

    pub fn vertex() -> Self {
        StratumId(vec![Token::Vertex])
    }

    pub fn body(link_stratum: &StratumId) -> Self {
        StratumId(vec![Token::Body(link_stratum.clone())])
    }

    pub fn pole(north: bool) -> Self {
        StratumId(vec![Token::Pole(north)])
    }

    pub fn swept(link_stratum: &StratumId) -> Self {
        StratumId(vec![Token::Swept(link_stratum.clone())])
    }

    pub fn fiber(base: &StratumId, link_stratum: &StratumId) -> Self {
        StratumId(vec![Token::Fiber(base.clone(), link_stratum.clone())])
    }

    /// Prefix this id with a construction step, as products and disjoint
    /// unions do when they import the strata of a factor.
    pub fn prefixed(&self, head: Token) -> Self {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.push(head);
        path.extend(self.0.iter().cloned());
        StratumId(path)
    }
}

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for token in &self.0 {
            if !first {
                write!(f, "/")?;
            }
            write!(f, "{token}")?;
            first = false;
        }
        Ok(())
    }
}

/// Identifier of a bundle chart within a tube.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChartId(pub String);

impl ChartId {
    pub fn new(name: &str) -> Self {
        ChartId(name.to_string())
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sign of an unbending copy or of an odd extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign composition: lifting with `self` after a copy tagged `other`.
    pub fn compose(self, other: Sign) -> Sign {
        match self {
            Sign::Plus => other,
            Sign::Minus => other.flip(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}
