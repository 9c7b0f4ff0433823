use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Whether a symbol is one of the dynamical variables or an inert parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    X,
    Y,
    Z,
    Parameter,
}

/// A variable name. `x`, `y` and `z` (with `z` standing for `y'`) are the main
/// variables; every other identifier is a parameter and behaves as a constant
/// under differentiation by a main variable.
///
/// Symbols order as `x < y < z < parameters`, parameters alphabetically. The
/// smaller symbol has the higher priority in the lexicographic monomial order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        Symbol(Arc::from(name))
    }

    pub fn x() -> Symbol {
        Symbol::new("x")
    }

    pub fn y() -> Symbol {
        Symbol::new("y")
    }

    pub fn z() -> Symbol {
        Symbol::new("z")
    }

    pub fn main_variables() -> [Symbol; 3] {
        [Symbol::x(), Symbol::y(), Symbol::z()]
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> SymbolKind {
        match &*self.0 {
            "x" => SymbolKind::X,
            "y" => SymbolKind::Y,
            "z" => SymbolKind::Z,
            _ => SymbolKind::Parameter,
        }
    }

    pub fn is_main(&self) -> bool {
        self.kind() != SymbolKind::Parameter
    }

    pub fn is_parameter(&self) -> bool {
        self.kind() == SymbolKind::Parameter
    }

    fn rank(&self) -> u8 {
        match self.kind() {
            SymbolKind::X => 0,
            SymbolKind::Y => 1,
            SymbolKind::Z => 2,
            SymbolKind::Parameter => 3,
        }
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_variables_precede_parameters() {
        let mut syms = vec![
            Symbol::new("b"),
            Symbol::z(),
            Symbol::new("B"),
            Symbol::x(),
            Symbol::new("a"),
            Symbol::y(),
        ];
        syms.sort();
        let names: Vec<_> = syms.iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names, ["x", "y", "z", "B", "a", "b"]);
        assert!(Symbol::z().is_main());
        assert!(Symbol::new("a").is_parameter());
    }
}
