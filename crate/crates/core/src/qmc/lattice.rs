//! Randomly shifted rank-1 lattice rules.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_power_of_two, QmcError};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRule {
    pub n: u64,
    pub z: Vec<u64>,
    /// one shift vector in `[0, 1)^s` per randomization
    pub shifts: Vec<Vec<f64>>,
}

impl LatticeRule {
    /// Validates `n = 2^k`, odd `z_j` (reduced mod `n`) and shift dimensions.
    pub fn new(n: u64, z: Vec<u64>, shifts: Vec<Vec<f64>>) -> Result<Self, QmcError> {
        check_power_of_two(n)?;
        if z.is_empty() {
            return Err(QmcError::InvalidVector("empty generating vector".into()));
        }
        let z: Vec<u64> = z.into_iter().map(|v| v % n).collect();
        if let Some((j, v)) = z.iter().enumerate().find(|(_, v)| *v % 2 == 0) {
            return Err(QmcError::InvalidVector(format!("z_{} = {v} is not a unit modulo {n}", j + 1)));
        }
        if let Some(sh) = shifts.iter().find(|sh| sh.len() != z.len() || sh.iter().any(|d| !(0.0..1.0).contains(d))) {
            return Err(QmcError::InvalidVector(format!("shift {sh:?} does not lie in [0,1)^{}", z.len())));
        }
        Ok(Self { n, z, shifts })
    }

    /// Rule with `count` shifts drawn from `seed` (shift `r` from stream `r`).
    pub fn with_random_shifts(n: u64, z: Vec<u64>, count: usize, seed: u64) -> Result<Self, QmcError> {
        let s = z.len();
        Self::new(n, z, random_shifts(s, count, seed))
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// First `s` coordinates only.
    pub fn truncate(&self, s: usize) -> Self {
        let s = s.min(self.dim());
        Self {
            n: self.n,
            z: self.z[..s].to_vec(),
            shifts: self.shifts.iter().map(|sh| sh[..s].to_vec()).collect(),
        }
    }
}

/// Shift `r` is `s` draws of `ChaCha8Rng::seed_from_u64(seed)` on stream `r`.
pub fn random_shifts(s: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|r| {
            let mut rng = base.clone();
            rng.set_stream(r as u64);
            (0..s).map(|_| rng.gen::<f64>()).collect()
        })
        .collect()
}

/// `frac(i z_j / n + shift_j) - 1/2` for 1-based `i`.
pub fn lattice_point(n: u64, z: &[u64], shift: Option<&[f64]>, i: u64) -> Vec<f64> {
    z.iter()
        .enumerate()
        .map(|(j, &zj)| {
            let base = ((i as u128 * zj as u128) % n as u128) as f64 / n as f64;
            let mut v = base + shift.map_or(0.0, |s| s[j]);
            if v >= 1.0 {
                v -= 1.0;
            }
            v - 0.5
        })
        .collect()
}

/// The `n` points of the rule under shift `shift_index`, `i = 1..=n`.
pub fn lattice_points(rule: &LatticeRule, shift_index: usize) -> Result<Vec<Vec<f64>>, QmcError> {
    let shift = rule
        .shifts
        .get(shift_index)
        .ok_or(QmcError::ShiftIndex { index: shift_index, count: rule.shifts.len() })?;
    Ok((1..=rule.n).map(|i| lattice_point(rule.n, &rule.z, Some(shift), i)).collect())
}

/// Unshifted points.
pub fn lattice_points_unshifted(n: u64, z: &[u64]) -> Vec<Vec<f64>> {
    (1..=n).map(|i| lattice_point(n, z, None, i)).collect()
}

/// Writes `# s n` followed by one component per line.
pub fn write_generating_vector<W: Write>(mut w: W, n: u64, z: &[u64]) -> std::io::Result<()> {
    writeln!(w, "# {} {}", z.len(), n)?;
    for v in z {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

/// Parses the format of [`write_generating_vector`]; returns `(n, z)`.
pub fn read_generating_vector(text: &str) -> Result<(u64, Vec<u64>), QmcError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| QmcError::Parse { line: 1, message: "empty file".into() })?;
    let fields: Vec<&str> = header.trim().trim_start_matches('#').split_whitespace().collect();
    let parse_header = || -> Option<(usize, u64)> {
        if !header.trim_start().starts_with('#') || fields.len() != 2 {
            return None;
        }
        Some((fields[0].parse().ok()?, fields[1].parse().ok()?))
    };
    let (s, n) = parse_header().ok_or_else(|| QmcError::Parse { line: 1, message: format!("expected header \"# s n\", got {header:?}") })?;
    check_power_of_two(n)?;
    let mut z = Vec::with_capacity(s);
    for (idx, line) in lines {
        let v: u64 = line
            .trim()
            .parse()
            .map_err(|_| QmcError::Parse { line: idx + 1, message: format!("not an integer: {line:?}") })?;
        z.push(v);
    }
    if z.len() != s {
        return Err(QmcError::Parse { line: 1, message: format!("header announces {s} components, found {}", z.len()) });
    }
    LatticeRule::new(n, z.clone(), Vec::new())?;
    Ok((n, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let pts = lattice_points_unshifted(4, &[1]);
        let flat: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        assert_eq!(flat, vec![-0.25, 0.0, 0.25, -0.5]);
        let rule = LatticeRule::new(16, vec![1, 5, 7], vec![vec![0.0; 3]]).unwrap();
        let last = &lattice_points(&rule, 0).unwrap()[15];
        assert_eq!(last, &vec![-0.5; 3]);
        assert!(lattice_points(&rule, 1).is_err());
    }

    #[test]
    fn shifted_set_is_translate() {
        let rule = LatticeRule::with_random_shifts(32, vec![1, 13], 3, 7).unwrap();
        for r in 0..3 {
            let pts = lattice_points(&rule, r).unwrap();
            for (i, p) in pts.iter().enumerate() {
                let base = lattice_point(32, &rule.z, None, i as u64 + 1);
                for j in 0..2 {
                    assert!((-0.5..0.5).contains(&p[j]));
                    let d = p[j] - base[j] - rule.shifts[r][j];
                    assert!((d - d.round()).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn shift_streams_are_reproducible() {
        let a = random_shifts(5, 4, 42);
        let b = random_shifts(5, 6, 42);
        assert_eq!(a[..], b[..4]);
        assert_ne!(a[0], a[1]);
        assert_ne!(random_shifts(5, 1, 43)[0], a[0]);
    }

    #[test]
    fn validation() {
        assert!(LatticeRule::new(12, vec![1], vec![]).is_err());
        assert!(LatticeRule::new(16, vec![4], vec![]).is_err());
        assert!(LatticeRule::new(16, vec![1], vec![vec![1.0]]).is_err());
        assert_eq!(LatticeRule::new(16, vec![17], vec![]).unwrap().z, vec![1]);
    }

    #[test]
    fn vector_text_round_trip() {
        let mut buf = Vec::new();
        write_generating_vector(&mut buf, 64, &[1, 19, 27]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# 3 64\n1\n19\n27\n");
        assert_eq!(read_generating_vector(&text).unwrap(), (64, vec![1, 19, 27]));
        assert!(read_generating_vector("# 2 64\n1\n").is_err());
        assert!(read_generating_vector("3 64\n1\n").is_err());
        assert!(matches!(read_generating_vector("# 1 64\nx\n"), Err(QmcError::Parse { line: 2, .. })));
        assert!(read_generating_vector("# 1 60\n1\n").is_err());
    }
}
