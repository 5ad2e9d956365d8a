//! Text notation for moves and sequences.
//!
//! Scrambles and solution traces are whitespace-separated tokens. The six
//! face turns use single letters with an optional `'` (inverse) or `2`
//! (square) suffix, matching the usual convention; the parser is
//! case-sensitive. Beyond those, `Mx`/`My`/`Mz` name the middle-slice
//! quarter-turns, `C2` the phase-2 corner-twisting macro, and
//! `C3x`/`C4x`/... the phase-4 edge-cycling macros with optional suffixes:
//! `s` squares the other face of the pair, `'` mirrors the slice direction,
//! and `@G`/`@G'` conjugates by a face turn. Commutators print and parse as
//! `[A,B]` without spaces.

use crate::moves::{Axis, Conjugator, EdgeCycleSpec, Generator, Move, MoveSequence};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NotationError {
    #[error("unrecognized move token `{0}`")]
    BadToken(String),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Gen(g) => write!(f, "{g}"),
            Move::GenInv(g) => write!(f, "{g}'"),
            Move::Square(g) => write!(f, "{g}2"),
            Move::Slice(a) => write!(f, "M{a}"),
            Move::SliceInv(a) => write!(f, "M{a}'"),
            Move::Commutator(a, b) => write!(f, "[{a},{b}]"),
            Move::CornerTwist => write!(f, "C2"),
            Move::CornerTwistInv => write!(f, "C2'"),
            Move::EdgeCycle(spec) => {
                write!(
                    f,
                    "C{}{}{}{}",
                    if spec.inverse { '4' } else { '3' },
                    spec.axis,
                    if spec.swapped_pair { "s" } else { "" },
                    if spec.mirrored { "'" } else { "" },
                )?;
                if let Some(c) = spec.conj {
                    write!(f, "@{}{}", c.gen, if c.inv { "'" } else { "" })?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn parse_generator(c: char) -> Option<Generator> {
    match c {
        'U' => Some(Generator::U),
        'D' => Some(Generator::D),
        'F' => Some(Generator::F),
        'B' => Some(Generator::B),
        'L' => Some(Generator::L),
        'R' => Some(Generator::R),
        _ => None,
    }
}

fn parse_axis(c: char) -> Option<Axis> {
    match c {
        'x' => Some(Axis::X),
        'y' => Some(Axis::Y),
        'z' => Some(Axis::Z),
        _ => None,
    }
}

pub fn parse_move(token: &str) -> Result<Move, NotationError> {
    let bad = || NotationError::BadToken(token.to_string());
    let chars: Vec<char> = token.chars().collect();
    match chars.as_slice() {
        [] => Err(bad()),
        ['[', ..] => {
            if *chars.last().unwrap() != ']' {
                return Err(bad());
            }
            let inner = &token[1..token.len() - 1];
            let mut depth = 0usize;
            let mut split = None;
            for (i, c) in inner.char_indices() {
                match c {
                    '[' => depth += 1,
                    ']' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                    ',' if depth == 0 => {
                        if split.is_some() {
                            return Err(bad());
                        }
                        split = Some(i);
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(bad)?;
            let a = parse_move(&inner[..i])?;
            let b = parse_move(&inner[i + 1..])?;
            Ok(Move::Commutator(Box::new(a), Box::new(b)))
        }
        ['M', axis] => Ok(Move::Slice(parse_axis(*axis).ok_or_else(bad)?)),
        ['M', axis, '\''] => Ok(Move::SliceInv(parse_axis(*axis).ok_or_else(bad)?)),
        ['C', '2'] => Ok(Move::CornerTwist),
        ['C', '2', '\''] => Ok(Move::CornerTwistInv),
        ['C', kind @ ('3' | '4'), axis, rest @ ..] => {
            let mut spec = EdgeCycleSpec {
                axis: parse_axis(*axis).ok_or_else(bad)?,
                swapped_pair: false,
                mirrored: false,
                inverse: *kind == '4',
                conj: None,
            };
            let mut rest = rest;
            if let ['s', tail @ ..] = rest {
                spec.swapped_pair = true;
                rest = tail;
            }
            if let ['\'', tail @ ..] = rest {
                spec.mirrored = true;
                rest = tail;
            }
            match rest {
                [] => {}
                ['@', g] => {
                    spec.conj = Some(Conjugator {
                        gen: parse_generator(*g).ok_or_else(bad)?,
                        inv: false,
                    });
                }
                ['@', g, '\''] => {
                    spec.conj = Some(Conjugator {
                        gen: parse_generator(*g).ok_or_else(bad)?,
                        inv: true,
                    });
                }
                _ => return Err(bad()),
            }
            Ok(Move::EdgeCycle(spec))
        }
        [g] => Ok(Move::Gen(parse_generator(*g).ok_or_else(bad)?)),
        [g, '\''] => Ok(Move::GenInv(parse_generator(*g).ok_or_else(bad)?)),
        [g, '2'] => Ok(Move::Square(parse_generator(*g).ok_or_else(bad)?)),
        _ => Err(bad()),
    }
}

/// Parses a whitespace-separated move sequence.
pub fn parse_sequence(text: &str) -> Result<MoveSequence, NotationError> {
    let moves = text
        .split_whitespace()
        .map(parse_move)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MoveSequence(moves))
}
