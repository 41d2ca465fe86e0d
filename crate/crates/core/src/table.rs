//! Tables in the comma-separated benchmark convention.
//!
//! The header line types every column:
//!
//! * a name starting with an uppercase letter is numeric, anything else is symbolic;
//! * a name ending in `+` is a goal to maximize, `-` a goal to minimize;
//! * a name ending in `X` or `!` is carried along but ignored by distance and optimization;
//! * every other column is an independent (decision) column.
//!
//! A cell holding `?` is missing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const MISSING: &str = "?";
const NORM_EPS: f64 = 1e-32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Numeric,
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Independent,
    Goal,
    Ignored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: Kind,
    pub role: Role,
    /// +1 maximize, -1 minimize, 0 for non-goals.
    pub weight: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Column {
    /// Types a column from its header name alone.
    pub fn from_header(name: &str) -> Column {
        let name = name.trim();
        let kind = if name.chars().next().is_some_and(char::is_uppercase) {
            Kind::Numeric
        } else {
            Kind::Symbolic
        };
        let (role, weight) = if name.ends_with('+') {
            (Role::Goal, 1.0)
        } else if name.ends_with('-') {
            (Role::Goal, -1.0)
        } else if name.ends_with('X') || name.ends_with('!') {
            (Role::Ignored, 0.0)
        } else {
            (Role::Independent, 0.0)
        };
        Column {
            name: name.to_string(),
            kind,
            role,
            weight,
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.kind == Kind::Numeric
    }

    /// True once at least one non-missing value has been observed.
    pub fn has_range(&self) -> bool {
        self.lo <= self.hi
    }

    pub fn norm(&self, v: f64) -> f64 {
        norm_value(self.lo, self.hi, v)
    }

    fn observe(&mut self, v: f64) {
        self.lo = self.lo.min(v);
        self.hi = self.hi.max(v);
    }
}

/// Min-max normalization into [0, 1]; a zero-width range maps to 0.5.
pub fn norm_value(lo: f64, hi: f64, v: f64) -> f64 {
    if hi == lo {
        return 0.5;
    }
    ((v - lo) / (hi - lo + NORM_EPS)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Sym(String),
    Missing,
}

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Sym(s) => f.write_str(s),
            Cell::Missing => f.write_str(MISSING),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// Indices of independent columns.
    pub x: Vec<usize>,
    /// Indices of goal columns.
    pub y: Vec<usize>,
}

impl Table {
    /// Builds a table from a header and already-typed rows, computing column ranges.
    pub fn new(name: impl Into<String>, header: &[&str], rows: Vec<Row>) -> Result<Table> {
        let columns: Vec<Column> = header.iter().map(|h| Column::from_header(h)).collect();
        let mut t = Table {
            name: name.into(),
            x: Vec::new(),
            y: Vec::new(),
            columns,
            rows: Vec::new(),
        };
        t.assign_roles()?;
        for (i, row) in rows.into_iter().enumerate() {
            if row.cells.len() != t.columns.len() {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!(
                        "expected {} cells, found {}",
                        t.columns.len(),
                        row.cells.len()
                    ),
                });
            }
            t.rows.push(row);
        }
        t.compute_ranges();
        Ok(t)
    }

    fn assign_roles(&mut self) -> Result<()> {
        self.x.clear();
        self.y.clear();
        for (i, c) in self.columns.iter().enumerate() {
            match c.role {
                Role::Independent => self.x.push(i),
                Role::Goal => {
                    if c.kind != Kind::Numeric {
                        return Err(Error::Parse {
                            line: 1,
                            message: format!("goal column '{}' must be numeric", c.name),
                        });
                    }
                    self.y.push(i)
                }
                Role::Ignored => {}
            }
        }
        Ok(())
    }

    fn compute_ranges(&mut self) {
        for c in &mut self.columns {
            c.lo = f64::INFINITY;
            c.hi = f64::NEG_INFINITY;
        }
        for row in &self.rows {
            for (c, cell) in self.columns.iter_mut().zip(&row.cells) {
                if let Cell::Num(v) = cell {
                    c.observe(*v);
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn goal_count(&self) -> usize {
        self.y.len()
    }

    /// Goal weights in `y` order.
    pub fn goal_weights(&self) -> Vec<f64> {
        self.y.iter().map(|&c| self.columns[c].weight).collect()
    }

    /// The goal values of a row, or `None` when any goal cell is missing.
    pub fn goal_vector(&self, row: usize) -> Option<Vec<f64>> {
        self.y
            .iter()
            .map(|&c| self.rows[row].cells[c].as_num())
            .collect()
    }

    /// Demotes every goal except the first to an ignored column.
    pub fn keep_first_goal(&mut self) {
        for &c in self.y.iter().skip(1) {
            self.columns[c].role = Role::Ignored;
            self.columns[c].weight = 0.0;
        }
        self.y.truncate(1);
    }

    /// Fails unless the table can be optimized (at least one goal and one independent column).
    pub fn check_optimizable(&self) -> Result<()> {
        if self.y.is_empty() {
            return Err(Error::NoGoals);
        }
        if self.x.is_empty() {
            return Err(Error::NoIndependent);
        }
        Ok(())
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Writes the table back out in the same convention `load_table` reads.
    pub fn emit(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.cells.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{cell}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Table> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "table".to_string());
        load_table(&name, &text)
    }

    /// Euclidean distance over independent columns, scaled into [0, 1].
    pub fn xdist(&self, a: &Row, b: &Row) -> f64 {
        xdist(a, b, self)
    }
}

/// Parses a table from text. Blank lines are skipped; LF and CRLF are both accepted.
pub fn load_table(name: &str, source: &str) -> Result<Table> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            message: "missing header".into(),
        });
    };
    let columns: Vec<Column> = header.split(',').map(Column::from_header).collect();
    let mut t = Table {
        name: name.to_string(),
        columns,
        rows: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
    };
    t.assign_roles()?;
    for (line_no, line) in lines {
        let raw: Vec<&str> = line.split(',').map(str::trim).collect();
        if raw.len() != t.columns.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected {} cells, found {}",
                    t.columns.len(),
                    raw.len()
                ),
            });
        }
        let mut cells = Vec::with_capacity(raw.len());
        for (col, tok) in t.columns.iter().zip(raw) {
            cells.push(parse_cell(col, tok).map_err(|message| Error::Parse {
                line: line_no,
                message,
            })?);
        }
        t.rows.push(Row { cells });
    }
    t.compute_ranges();
    Ok(t)
}

fn parse_cell(col: &Column, tok: &str) -> std::result::Result<Cell, String> {
    if tok == MISSING {
        return Ok(Cell::Missing);
    }
    match col.kind {
        Kind::Numeric => tok
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Cell::Num)
            .ok_or_else(|| format!("column '{}': '{}' is not a number", col.name, tok)),
        Kind::Symbolic => Ok(Cell::Sym(tok.to_string())),
    }
}

/// Disagreement on one column, in [0, 1]. Missing cells take the worst case.
fn column_gap(col: &Column, a: &Cell, b: &Cell) -> f64 {
    match col.kind {
        Kind::Numeric => match (a.as_num(), b.as_num()) {
            (Some(u), Some(v)) => (col.norm(u) - col.norm(v)).abs(),
            (Some(v), None) | (None, Some(v)) => {
                let n = col.norm(v);
                n.max(1.0 - n)
            }
            (None, None) => 1.0,
        },
        Kind::Symbolic => match (a, b) {
            (Cell::Sym(u), Cell::Sym(v)) if u == v => 0.0,
            _ => 1.0,
        },
    }
}

/// Euclidean distance over the independent columns of `t`, divided by `sqrt(|x|)`.
pub fn xdist(a: &Row, b: &Row, t: &Table) -> f64 {
    if t.x.is_empty() {
        return 0.0;
    }
    let sum: f64 = t
        .x
        .iter()
        .map(|&c| {
            let g = column_gap(&t.columns[c], &a.cells[c], &b.cells[c]);
            g * g
        })
        .sum();
    (sum / t.x.len() as f64).sqrt()
}

/// Dense view of the independent columns: numeric cells pre-normalized, symbols interned.
///
/// Missing cells are `NaN`. Distances agree with [`xdist`].
#[derive(Debug, Clone)]
pub struct XSpace {
    kinds: Vec<Kind>,
    values: Vec<f64>,
    width: usize,
    rows: usize,
    symbols: Vec<Vec<String>>,
}

impl XSpace {
    pub fn new(t: &Table) -> XSpace {
        let width = t.x.len();
        let kinds: Vec<Kind> = t.x.iter().map(|&c| t.columns[c].kind).collect();
        let mut interned: Vec<HashMap<String, usize>> = vec![HashMap::new(); width];
        let mut symbols: Vec<Vec<String>> = vec![Vec::new(); width];
        let mut values = Vec::with_capacity(width * t.len());
        for row in &t.rows {
            for (k, &c) in t.x.iter().enumerate() {
                let v = match &row.cells[c] {
                    Cell::Missing => f64::NAN,
                    Cell::Num(v) => t.columns[c].norm(*v),
                    Cell::Sym(s) => {
                        let next = symbols[k].len();
                        let id = *interned[k].entry(s.clone()).or_insert(next);
                        if id == next {
                            symbols[k].push(s.clone());
                        }
                        id as f64
                    }
                };
                values.push(v);
            }
        }
        XSpace {
            kinds,
            values,
            width,
            rows: t.len(),
            symbols,
        }
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self, k: usize) -> Kind {
        self.kinds[k]
    }

    pub fn kinds(&self) -> &[Kind] {
        &self.kinds
    }

    /// Distinct symbols seen in independent column `k` (empty for numeric columns).
    pub fn symbols(&self, k: usize) -> &[String] {
        &self.symbols[k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist_to(self.row(i), j)
    }

    /// Distance from an arbitrary point (same encoding as `row`) to row `j`.
    pub fn dist_to(&self, point: &[f64], j: usize) -> f64 {
        if self.width == 0 {
            return 0.0;
        }
        let other = self.row(j);
        let mut sum = 0.0;
        for k in 0..self.width {
            let g = gap(self.kinds[k], point[k], other[k]);
            sum += g * g;
        }
        (sum / self.width as f64).sqrt()
    }
}

fn gap(kind: Kind, a: f64, b: f64) -> f64 {
    match (kind, a.is_nan(), b.is_nan()) {
        (_, true, true) => 1.0,
        (Kind::Numeric, false, false) => (a - b).abs(),
        (Kind::Numeric, false, true) => a.max(1.0 - a),
        (Kind::Numeric, true, false) => b.max(1.0 - b),
        (Kind::Symbolic, false, false) => {
            if a == b {
                0.0
            } else {
                1.0
            }
        }
        (Kind::Symbolic, _, _) => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(lo: f64, hi: f64) -> Column {
        let mut c = Column::from_header("A");
        c.lo = lo;
        c.hi = hi;
        c
    }

    #[test]
    fn header_rules() {
        let t = load_table("t", "Ncpu,color,Energy-,Acc+\n").unwrap();
        let c = &t.columns;
        assert_eq!((c[0].kind, c[0].role), (Kind::Numeric, Role::Independent));
        assert_eq!((c[1].kind, c[1].role), (Kind::Symbolic, Role::Independent));
        assert_eq!((c[2].kind, c[2].role, c[2].weight), (Kind::Numeric, Role::Goal, -1.0));
        assert_eq!((c[3].kind, c[3].role, c[3].weight), (Kind::Numeric, Role::Goal, 1.0));
        assert_eq!(t.x, vec![0, 1]);
        assert_eq!(t.y, vec![2, 3]);
        assert_eq!(c[0].weight, 0.0);
    }

    #[test]
    fn missing_cell_row() {
        let t = load_table("t", "Ncpu,color,Energy-,Acc+\n4,red,?,0.9\n").unwrap();
        assert_eq!(t.rows[0].cells[2], Cell::Missing);
        assert_eq!(t.rows[0].cells[0], Cell::Num(4.0));
        assert_eq!(t.rows[0].cells[1], Cell::Sym("red".into()));
        assert_eq!(t.goal_vector(0), None);
    }

    #[test]
    fn only_goals_loads_but_is_rejected() {
        let t = load_table("t", "A+,B-\n").unwrap();
        assert!(t.x.is_empty());
        assert_eq!(t.check_optimizable(), Err(Error::NoIndependent));
        let t = load_table("t", "A,B\n1,2\n").unwrap();
        assert_eq!(t.check_optimizable(), Err(Error::NoGoals));
    }

    #[test]
    fn ignored_columns() {
        let t = load_table("t", "A,IdX,class!,B-\n1,2,x,3\n").unwrap();
        assert_eq!(t.x, vec![0]);
        assert_eq!(t.y, vec![3]);
        assert_eq!(t.columns[1].role, Role::Ignored);
        assert_eq!(t.columns[2].role, Role::Ignored);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = load_table("t", "A,B-\n1,2\n\n3\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 4,
                message: "expected 2 cells, found 1".into()
            }
        );
    }

    #[test]
    fn non_numeric_token_rejected() {
        let err = load_table("t", "A,B-\n1,2\nfoo,3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn crlf_and_ranges() {
        let t = load_table("t", "A,B-\r\n1,5\r\n?,2\r\n-3,9\r\n").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!((t.columns[0].lo, t.columns[0].hi), (-3.0, 1.0));
        assert_eq!((t.columns[1].lo, t.columns[1].hi), (2.0, 9.0));
    }

    #[test]
    fn symbolic_goal_rejected() {
        assert!(load_table("t", "A,score+\n").is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(col(0.0, 10.0).norm(5.0), 0.5);
        assert_eq!(col(3.0, 3.0).norm(3.0), 0.5);
        assert_eq!(col(0.0, 10.0).norm(12.0), 1.0);
        assert_eq!(col(0.0, 10.0).norm(-2.0), 0.0);
    }

    #[test]
    fn xdist_examples() {
        let t = load_table("t", "A,B,C-\n0,0,1\n1,0,1\n0.5,1,1\n").unwrap();
        assert_eq!(xdist(&t.rows[0], &t.rows[0], &t), 0.0);
        assert!((xdist(&t.rows[0], &t.rows[1], &t) - 1.0 / 2f64.sqrt()).abs() < 1e-12);

        let t = load_table("t", "A,b,C-\n0,red,1\n10,blue,1\n").unwrap();
        assert!((xdist(&t.rows[0], &t.rows[1], &t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xdist_missing_is_pessimistic() {
        let t = load_table("t", "A,b,C-\n0,red,1\n10,blue,1\n?,?,1\n2,?,1\n").unwrap();
        let d = |i: usize, j: usize| xdist(&t.rows[i], &t.rows[j], &t);
        // missing vs missing on both columns
        assert!((d(2, 2) - 1.0).abs() < 1e-12);
        // row 3: A norm 0.2 vs missing -> 0.8; symbol vs missing -> 1
        let expect = ((0.8f64.powi(2) + 1.0) / 2.0).sqrt();
        assert!((d(3, 2) - expect).abs() < 1e-9);
    }

    #[test]
    fn space_matches_xdist() {
        let t = load_table(
            "t",
            "A,b,C,D-\n0,red,3,1\n10,blue,?,1\n?,?,4,1\n2,red,9,1\n7,green,3,2\n",
        )
        .unwrap();
        let s = XSpace::new(&t);
        for i in 0..t.len() {
            for j in 0..t.len() {
                let a = xdist(&t.rows[i], &t.rows[j], &t);
                assert!((a - s.dist(i, j)).abs() < 1e-12, "{i} {j}");
            }
        }
        assert_eq!(s.symbols(1), &["red", "blue", "green"]);
    }

    fn arb_table() -> impl Strategy<Value = Table> {
        prop::collection::vec((0.0f64..100.0, 0u8..3, -50.0f64..50.0), 3..12).prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|(a, s, c)| Row {
                    cells: vec![
                        Cell::Num(a),
                        Cell::Sym(format!("s{s}")),
                        Cell::Num(c),
                        Cell::Num(a + c),
                    ],
                })
                .collect();
            Table::new("p", &["A", "kind", "C", "Out-"], rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn xdist_is_a_semimetric(t in arb_table()) {
            let n = t.len();
            for i in 0..n {
                prop_assert_eq!(xdist(&t.rows[i], &t.rows[i], &t), 0.0);
                for j in 0..n {
                    let dij = xdist(&t.rows[i], &t.rows[j], &t);
                    prop_assert!((0.0..=1.0).contains(&dij));
                    prop_assert_eq!(dij, xdist(&t.rows[j], &t.rows[i], &t));
                    for k in 0..n {
                        let dik = xdist(&t.rows[i], &t.rows[k], &t);
                        let dkj = xdist(&t.rows[k], &t.rows[j], &t);
                        prop_assert!(dij <= dik + dkj + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn emit_round_trips(t in arb_table()) {
            let back = load_table("p", &t.emit()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
