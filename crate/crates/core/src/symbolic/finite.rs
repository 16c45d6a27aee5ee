use super::{Edge, EdgeShift, ShiftError};

const POINT_LETTERS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// A self-map of a finite discrete space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSystem {
    map: Vec<usize>,
}

impl FiniteSystem {
    pub fn new(map: Vec<usize>) -> Result<Self, ShiftError> {
        let n = map.len();
        if let Some(&bad) = map.iter().find(|&&t| t >= n) {
            return Err(ShiftError::UnknownState(bad));
        }
        Ok(FiniteSystem { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Whether `x` lies on a cycle of the map.
    pub fn is_periodic(&self, x: usize) -> bool {
        let mut y = self.map[x];
        for _ in 0..self.map.len() {
            if y == x {
                return true;
            }
            y = self.map[y];
        }
        false
    }

    /// Whether the forward orbits of `x` and `y` eventually coincide.
    pub fn orbits_merge(&self, x: usize, y: usize) -> bool {
        let (mut a, mut b) = (x, y);
        for _ in 0..=self.map.len() {
            if a == b {
                return true;
            }
            a = self.map[a];
            b = self.map[b];
        }
        a == b
    }

    /// Word model: one letter per point, one edge `x -> T(x)` labelled `x`.
    ///
    /// Only points on cycles survive trimming, so the model has zero entropy.
    pub fn to_edge_shift(&self) -> Result<EdgeShift, ShiftError> {
        let letters: Vec<char> = POINT_LETTERS.chars().collect();
        if self.map.len() > letters.len() {
            return Err(ShiftError::ResourceExceeded(letters.len()));
        }
        let alphabet = letters[..self.map.len()].to_vec();
        let names = (0..self.map.len()).map(|i| i.to_string()).collect();
        let edges = self
            .map
            .iter()
            .enumerate()
            .map(|(x, &t)| Edge {
                source: x,
                target: t,
                label: x as u8,
            })
            .collect();
        EdgeShift::from_edges(alphabet, names, edges)
    }
}
