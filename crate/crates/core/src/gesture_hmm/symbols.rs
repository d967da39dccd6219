use std::fmt;

use crate::error::{Error, Result};
use crate::hand_tracker::Direction;

/// Number of motion symbols; pose symbols follow them.
pub const MOTION_SYMBOLS: usize = 4;

/// One frame's observable content: a classified still pose or a motion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FrameTuple {
    Pose(String),
    Motion(Direction),
}

impl fmt::Display for FrameTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameTuple::Pose(p) => write!(f, "pose {p}"),
            FrameTuple::Motion(d) => write!(f, "motion {}", d.name()),
        }
    }
}

/// Decoded observation symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation<'a> {
    Motion(Direction),
    Pose(&'a str),
}

/// Fixed motion codes `up:0 right:1 left:2 down:3`, then intermediate poses
/// from 4 upward in table order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolTable {
    poses: Vec<String>,
}

impl SymbolTable {
    pub fn new(poses: Vec<String>) -> Result<Self> {
        for (i, p) in poses.iter().enumerate() {
            if p.is_empty() || p.contains([',', ' ', '\t']) {
                return Err(Error::InvalidArgument(format!("invalid pose label `{p}`")));
            }
            if Direction::parse(p).is_some() {
                return Err(Error::InvalidArgument(format!("pose label `{p}` collides with a motion name")));
            }
            if poses[..i].contains(p) {
                return Err(Error::InvalidArgument(format!("duplicate pose label `{p}`")));
            }
        }
        Ok(SymbolTable { poses })
    }

    pub fn poses(&self) -> &[String] {
        &self.poses
    }

    /// Alphabet size `4 + P`.
    pub fn size(&self) -> usize {
        MOTION_SYMBOLS + self.poses.len()
    }

    pub fn motion_symbol(d: Direction) -> usize {
        match d {
            Direction::Up => 0,
            Direction::Right => 1,
            Direction::Left => 2,
            Direction::Down => 3,
        }
    }

    pub fn pose_symbol(&self, label: &str) -> Result<usize> {
        self.poses
            .iter()
            .position(|p| p == label)
            .map(|i| MOTION_SYMBOLS + i)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Symbol for a pose label or a motion name (`up`, `right`, ...).
    pub fn symbol_by_name(&self, name: &str) -> Result<usize> {
        match Direction::parse(name) {
            Some(d) => Ok(Self::motion_symbol(d)),
            None => self.pose_symbol(name),
        }
    }

    pub fn symbol(&self, t: &FrameTuple) -> Result<usize> {
        match t {
            FrameTuple::Motion(d) => Ok(Self::motion_symbol(*d)),
            FrameTuple::Pose(p) => self.pose_symbol(p),
        }
    }

    pub fn decode(&self, symbol: usize) -> Result<Observation<'_>> {
        match symbol {
            0 => Ok(Observation::Motion(Direction::Up)),
            1 => Ok(Observation::Motion(Direction::Right)),
            2 => Ok(Observation::Motion(Direction::Left)),
            3 => Ok(Observation::Motion(Direction::Down)),
            s if s < self.size() => Ok(Observation::Pose(&self.poses[s - MOTION_SYMBOLS])),
            s => Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.size(),
            }),
        }
    }

    pub fn name(&self, symbol: usize) -> Result<&str> {
        Ok(match self.decode(symbol)? {
            Observation::Motion(d) => d.name(),
            Observation::Pose(p) => p,
        })
    }
}

/// One symbol per frame, repeats kept.
pub fn encode(tuples: &[FrameTuple], table: &SymbolTable) -> Result<Vec<usize>> {
    tuples.iter().map(|t| table.symbol(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::new(
            ["Thumbs_Up", "Sun_Up", "Flat_Palm", "Fist", "Point", "Victory", "Three", "Four", "Open_Palm"]
                .map(String::from)
                .to_vec(),
        )
        .unwrap()
    }

    fn pose(p: &str) -> FrameTuple {
        FrameTuple::Pose(p.to_string())
    }

    #[test]
    fn nine_poses_give_thirteen_symbols() {
        assert_eq!(table().size(), 13);
    }

    #[test]
    fn good_afternoon_encoding() {
        let mut stream = vec![pose("Thumbs_Up"); 3];
        stream.extend(vec![FrameTuple::Motion(Direction::Up); 3]);
        stream.extend(vec![pose("Sun_Up"); 3]);
        assert_eq!(encode(&stream, &table()).unwrap(), vec![4, 4, 4, 0, 0, 0, 5, 5, 5]);
    }

    #[test]
    fn small_cases() {
        assert!(encode(&[], &table()).unwrap().is_empty());
        assert_eq!(encode(&[FrameTuple::Motion(Direction::Down)], &table()).unwrap(), vec![3]);
        assert!(matches!(encode(&[pose("Nope")], &table()), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn decode_inverts_encode() {
        let t = table();
        let mut stream: Vec<FrameTuple> = Direction::ALL.into_iter().map(FrameTuple::Motion).collect();
        stream.extend(t.poses().iter().map(|p| pose(p)));
        let syms = encode(&stream, &t).unwrap();
        assert_eq!(syms, (0..13).collect::<Vec<_>>());
        for (s, tuple) in syms.iter().zip(&stream) {
            let back = match t.decode(*s).unwrap() {
                Observation::Motion(d) => FrameTuple::Motion(d),
                Observation::Pose(p) => pose(p),
            };
            assert_eq!(&back, tuple);
        }
        assert!(t.decode(13).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(SymbolTable::new(vec!["a".into(), "a".into()]).is_err());
        assert!(SymbolTable::new(vec!["up".into()]).is_err());
        assert!(SymbolTable::new(vec!["a b".into()]).is_err());
    }
}
