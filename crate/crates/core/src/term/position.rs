use std::fmt;
use std::str::FromStr;

/// A path of 1-based argument indices. The empty path is the root.
///
/// `Display` prints `e` for the root and dot-separated indices otherwise;
/// the alternate form `{:#}` prints `Λ` for the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// p.i
    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// p.q
    pub fn concat(&self, q: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&q.0);
        Position(v)
    }

    /// p ≤ q
    pub fn is_prefix_of(&self, q: &Position) -> bool {
        q.0.starts_with(&self.0)
    }

    /// q with the prefix `self` removed, if `self ≤ q`.
    pub fn strip_prefix_of(&self, q: &Position) -> Option<Position> {
        q.0.strip_prefix(self.0.as_slice()).map(|r| Position(r.to_vec()))
    }

    pub fn parent(&self) -> Option<Position> {
        let (_, init) = self.0.split_last()?;
        Some(Position(init.to_vec()))
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(if f.alternate() { "Λ" } else { "e" });
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed position `{0}`")]
pub struct PositionParseError(pub String);

impl FromStr for Position {
    type Err = PositionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "Λ" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(PositionParseError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl serde::Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let p: Position = "2.1".parse().unwrap();
        assert_eq!(p.indices(), &[2, 1]);
        assert_eq!(p.to_string(), "2.1");
        assert_eq!(Position::root().to_string(), "e");
        assert_eq!(format!("{:#}", Position::root()), "Λ");
        assert_eq!("Λ".parse::<Position>().unwrap(), Position::root());
        assert!("0.1".parse::<Position>().is_err());
        assert!("a".parse::<Position>().is_err());
    }

    #[test]
    fn prefix_order() {
        let p: Position = "1".parse().unwrap();
        let q: Position = "1.2".parse().unwrap();
        assert!(p.is_prefix_of(&q));
        assert!(!q.is_prefix_of(&p));
        assert!(Position::root().is_prefix_of(&p));
        assert_eq!(p.strip_prefix_of(&q), Some("2".parse().unwrap()));
        assert_eq!(q.parent(), Some(p.clone()));
        assert_eq!(p.concat(&"2".parse().unwrap()), q);
    }
}
