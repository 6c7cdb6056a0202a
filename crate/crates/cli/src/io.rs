use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use gonality::multigraph::GraphFile;
use gonality::{Divisor, Error, Multigraph};

/// Why a graph or divisor file was rejected, with the place it went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub path: String,
    /// `line:column` for syntax errors, a field path such as `edges[2]` for content errors.
    pub location: Option<String>,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Io(String),
    Syntax(String),
    Graph(Error),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path)?;
        if let Some(loc) = &self.location {
            write!(f, ":{loc}")?;
        }
        match &self.kind {
            ParseErrorKind::Io(m) | ParseErrorKind::Syntax(m) => write!(f, ": {m}"),
            ParseErrorKind::Graph(e) => write!(f, ": {e}"),
        }
    }
}

impl std::error::Error for ParseError {}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError {
        path: path.display().to_string(),
        location: None,
        kind: ParseErrorKind::Io(e.to_string()),
    })
}

fn syntax(path: &Path, e: serde_json::Error) -> ParseError {
    ParseError {
        path: path.display().to_string(),
        location: Some(format!("{}:{}", e.line(), e.column())),
        kind: ParseErrorKind::Syntax(e.to_string()),
    }
}

/// First field of `file` responsible for `err`.
fn locate(file: &GraphFile, err: &Error) -> Option<String> {
    let edge = |pred: &dyn Fn(&(String, String, i64)) -> bool| {
        file.edges.iter().position(pred).map(|i| format!("edges[{i}]"))
    };
    match err {
        Error::LoopEdge(v) => edge(&|(a, b, _)| a == v && b == v),
        Error::UnknownEndpoint(v) => edge(&|(a, b, _)| a == v || b == v),
        Error::NonPositiveMultiplicity(u, v) => edge(&|(a, b, m)| a == u && b == v && *m < 1),
        Error::DuplicateVertex(v) => {
            file.vertices.iter().enumerate().filter(|(_, x)| *x == v).nth(1).map(|(i, _)| format!("vertices[{i}]"))
        }
        _ => None,
    }
}

pub fn graph_from_str(path: &Path, text: &str) -> Result<Multigraph, ParseError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| syntax(path, e))?;
    Multigraph::from_file(&file).map_err(|e| ParseError {
        path: path.display().to_string(),
        location: locate(&file, &e),
        kind: ParseErrorKind::Graph(e),
    })
}

/// Reads a JSON graph file; labels are kept in file order.
pub fn parse_graph_file(path: impl AsRef<Path>) -> Result<Multigraph, ParseError> {
    let path = path.as_ref();
    graph_from_str(path, &read(path)?)
}

/// A divisor given inline (`a=2,b=-1`) or as a JSON file mapping labels to chips.
pub fn parse_divisor(g: &Multigraph, arg: &str) -> Result<Divisor, ParseError> {
    let path = Path::new(arg);
    if arg.ends_with(".json") && path.is_file() {
        let map: BTreeMap<String, i64> = serde_json::from_str(&read(path)?).map_err(|e| syntax(path, e))?;
        return Divisor::from_map(g, &map).map_err(|e| ParseError {
            path: arg.to_string(),
            location: None,
            kind: ParseErrorKind::Graph(e),
        });
    }
    Divisor::parse_inline(g, arg).map_err(|e| ParseError {
        path: "<divisor>".into(),
        location: None,
        kind: ParseErrorKind::Graph(e),
    })
}

pub fn graph_json(g: &Multigraph) -> serde_json::Value {
    serde_json::to_value(g.to_file()).expect("graph files serialise")
}
