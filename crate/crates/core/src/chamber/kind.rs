use std::fmt;

use serde::{Deserialize, Serialize};

use crate::marks::MarkSet;

/// Combinatorial type of a five-point chamber, read off from `D(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChamberType {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl ChamberType {
    pub const ALL: [ChamberType; 6] = [
        ChamberType::A,
        ChamberType::B,
        ChamberType::C,
        ChamberType::D,
        ChamberType::E,
        ChamberType::F,
    ];

    /// Types by `d(A)`; for `d = 3` the union of the three pairs decides
    /// between (D) (four markings) and (E) (three markings).
    pub fn from_d_set(d_set: &[MarkSet]) -> Option<Self> {
        match d_set.len() {
            0 => Some(ChamberType::A),
            1 => Some(ChamberType::B),
            2 => Some(ChamberType::C),
            3 => {
                let union = d_set.iter().fold(MarkSet::EMPTY, |u, s| u.union(*s));
                match union.len() {
                    4 => Some(ChamberType::D),
                    3 => Some(ChamberType::E),
                    _ => None,
                }
            }
            4 => Some(ChamberType::F),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            ChamberType::A => 'A',
            ChamberType::B => 'B',
            ChamberType::C => 'C',
            ChamberType::D => 'D',
            ChamberType::E => 'E',
            ChamberType::F => 'F',
        }
    }
}

impl fmt::Display for ChamberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}
