//! Forest text files and CSV outputs.
//!
//! A forest file carries its support tree with the data:
//!
//! ```text
//! FOREST v1
//! order=2 depth=3 trunk=1 attrs=length,radius,tortuosity
//! TREE id=A1 label=A
//! 1 3.25 4.5 2.125
//! 2 2.75 3.0 4.875
//! END
//! ```
//!
//! Branch lines are `<support-index> <attr1> ... <attrq>`; `label=-` marks
//! an unlabeled tree. Numbers are written in shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use treeclust_core::{DMatrix, SupportTreeSpec, Tree};

use crate::error::{Error, Result};

pub const MAGIC: &str = "FOREST v1";
const UNLABELED: &str = "-";

/// Trees together with the frame they are indexed in.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestFile {
    pub spec: SupportTreeSpec,
    pub attr_names: Vec<String>,
    pub trees: Vec<Tree>,
}

impl ForestFile {
    /// Wraps trees with generic attribute names `attr1..attrq`.
    pub fn new(spec: SupportTreeSpec, trees: Vec<Tree>) -> Self {
        let q = trees.first().map_or(0, Tree::q);
        Self {
            spec,
            attr_names: (1..=q).map(|i| format!("attr{i}")).collect(),
            trees,
        }
    }
}

fn check_token(what: &str, value: &str) -> Result<()> {
    if value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == ',') {
        return Err(Error::Invalid(format!(
            "{what} {value:?} must be non-empty without whitespace or commas"
        )));
    }
    Ok(())
}

pub fn format_forest(forest: &ForestFile) -> Result<String> {
    let q = forest.attr_names.len();
    for name in &forest.attr_names {
        check_token("attribute name", name)?;
    }
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(
        out,
        "order={} depth={} trunk={} attrs={}",
        forest.spec.order(),
        forest.spec.depth(),
        u8::from(forest.spec.trunk()),
        forest.attr_names.join(",")
    )
    .unwrap();
    for tree in &forest.trees {
        check_token("tree id", tree.id())?;
        if let Some(label) = tree.label() {
            check_token("label", label)?;
            if label == UNLABELED {
                return Err(Error::Invalid("label \"-\" is reserved for unlabeled trees".into()));
            }
        }
        if tree.q() != q {
            return Err(Error::Invalid(format!(
                "tree {} has {} attributes, header declares {q}",
                tree.id(),
                tree.q()
            )));
        }
        tree.validate(&forest.spec)?;
        writeln!(out, "TREE id={} label={}", tree.id(), tree.label().unwrap_or(UNLABELED)).unwrap();
        for (index, row) in tree.branches() {
            write!(out, "{index}").unwrap();
            for v in row {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out.push_str("END\n");
    }
    Ok(out)
}

pub fn parse_forest(text: &str) -> Result<ForestFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((n, other)) => return Err(Error::parse(n, format!("expected {MAGIC:?}, found {other:?}"))),
        None => return Err(Error::parse(0, "empty forest file")),
    }
    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header line"))?;
    let fields = key_values(header_line, header)?;
    let get = |key: &str| {
        fields
            .get(key)
            .ok_or_else(|| Error::parse(header_line, format!("header is missing {key}=")))
    };
    let number = |key: &str| -> Result<usize> {
        get(key)?
            .parse()
            .map_err(|_| Error::parse(header_line, format!("{key} must be a nonnegative integer")))
    };
    if let Some(extra) = fields
        .keys()
        .find(|k| !matches!(k.as_str(), "order" | "depth" | "trunk" | "attrs"))
    {
        return Err(Error::parse(header_line, format!("unknown header field {extra:?}")));
    }
    let trunk = match get("trunk")?.as_str() {
        "1" => true,
        "0" => false,
        other => return Err(Error::parse(header_line, format!("trunk must be 0 or 1, got {other:?}"))),
    };
    let spec = SupportTreeSpec::new(number("order")?, number("depth")?, trunk)
        .map_err(|e| Error::parse(header_line, e.to_string()))?;
    let attr_names: Vec<String> = get("attrs")?.split(',').map(str::to_owned).collect();
    if attr_names.iter().any(String::is_empty) {
        return Err(Error::parse(header_line, "empty attribute name"));
    }
    let q = attr_names.len();

    let mut trees = Vec::new();
    while let Some((tree_line, line)) = lines.next() {
        let rest = line
            .strip_prefix("TREE ")
            .ok_or_else(|| Error::parse(tree_line, format!("expected TREE, found {line:?}")))?;
        let fields = key_values(tree_line, rest)?;
        let id = fields
            .get("id")
            .ok_or_else(|| Error::parse(tree_line, "TREE line needs id="))?
            .clone();
        let label = match fields.get("label").map(String::as_str) {
            None | Some(UNLABELED) => None,
            Some(l) => Some(l.to_owned()),
        };
        let mut branches = BTreeMap::new();
        let mut closed = false;
        for (n, line) in lines.by_ref() {
            if line == "END" {
                closed = true;
                break;
            }
            let mut tokens = line.split_whitespace();
            let index: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(n, format!("expected a branch index, found {line:?}")))?;
            if !spec.contains(index) {
                return Err(Error::parse(
                    n,
                    format!("unknown branch index {index} (support has {})", spec.branch_count()),
                ));
            }
            let row = tokens
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse(n, format!("bad number {t:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != q {
                return Err(Error::parse(n, format!("expected {q} attributes, found {}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::parse(n, format!("attribute {v} is not strictly positive")));
            }
            if branches.insert(index, row).is_some() {
                return Err(Error::parse(n, format!("duplicate branch {index}")));
            }
        }
        if !closed {
            return Err(Error::parse(tree_line, format!("tree {id} is missing END")));
        }
        let tree = Tree::new(id, label, branches).map_err(|e| Error::parse(tree_line, e.to_string()))?;
        tree.validate(&spec).map_err(|e| Error::parse(tree_line, e.to_string()))?;
        trees.push(tree);
    }
    Ok(ForestFile {
        spec,
        attr_names,
        trees,
    })
}

fn key_values(line: usize, text: &str) -> Result<BTreeMap<String, String>> {
    text.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .ok_or_else(|| Error::parse(line, format!("expected key=value, found {tok:?}")))
        })
        .collect()
}

pub fn write_forest(forest: &ForestFile, path: &Path) -> Result<()> {
    let text = format_forest(forest)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_forest(path: &Path) -> Result<ForestFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_forest(&text)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// Row-major CSV with a `c1,...,cN` header.
pub fn write_matrix_csv(matrix: &DMatrix<f64>, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record((1..=matrix.ncols()).map(|j| format!("c{j}")))?;
    for row in matrix.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let cols = r.headers()?.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != cols {
            return Err(Error::parse(i + 2, format!("expected {cols} columns, found {}", record.len())));
        }
        for field in &record {
            values.push(
                field
                    .parse::<f64>()
                    .map_err(|_| Error::parse(i + 2, format!("bad number {field:?}")))?,
            );
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

/// `id,cluster` rows in input order.
pub fn write_labels_csv(ids: &[String], labels: &[usize], path: &Path) -> Result<()> {
    if ids.len() != labels.len() {
        return Err(Error::Invalid(format!(
            "{} ids but {} labels",
            ids.len(),
            labels.len()
        )));
    }
    let mut w = csv_writer(path)?;
    w.write_record(["id", "cluster"])?;
    for (id, label) in ids.iter().zip(labels) {
        w.write_record([id.as_str(), &label.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_labels_csv(path: &Path) -> Result<(Vec<String>, Vec<usize>)> {
    let mut r = csv::Reader::from_path(path)?;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let (Some(id), Some(label)) = (record.get(0), record.get(1)) else {
            return Err(Error::parse(i + 2, "expected id,cluster"));
        };
        ids.push(id.to_owned());
        labels.push(
            label
                .parse()
                .map_err(|_| Error::parse(i + 2, format!("bad cluster id {label:?}")))?,
        );
    }
    Ok((ids, labels))
}

/// Single-column CSV of values under `header`.
pub fn write_series_csv(header: &str, values: &[f64], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["step", header])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ForestFile {
        let spec = SupportTreeSpec::new(2, 2, true).unwrap();
        let t1 = Tree::new(
            "t1",
            Some("A".into()),
            [(1, vec![1.5, 0.1]), (2, vec![2.0, 1e-7]), (5, vec![3.0, 1.0 / 3.0])]
                .into_iter()
                .collect(),
        )
        .unwrap();
        let t2 = Tree::new("t2", None, [(1, vec![4.0, 5.0])].into_iter().collect()).unwrap();
        ForestFile {
            spec,
            attr_names: vec!["length".into(), "radius".into()],
            trees: vec![t1, t2],
        }
    }

    #[test]
    fn text_roundtrip() {
        let f = sample();
        let text = format_forest(&f).unwrap();
        assert!(text.starts_with("FOREST v1\norder=2 depth=2 trunk=1 attrs=length,radius\nTREE id=t1 label=A\n1 1.5 0.1\n"));
        assert!(text.contains("TREE id=t2 label=-\n1 4 5\nEND\n"));
        assert_eq!(parse_forest(&text).unwrap(), f);
    }

    #[test]
    fn attribute_count_error_names_line() {
        let text = "FOREST v1\norder=2 depth=2 trunk=1 attrs=a,b\nTREE id=x label=-\n1 1.0\nEND\n";
        match parse_forest(text).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("expected 2 attributes"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parse_errors() {
        let head = "FOREST v1\norder=2 depth=2 trunk=1 attrs=a\n";
        let cases = [
            ("FOREST v2\n", 1),
            ("FOREST v1\norder=2 depth=2 attrs=a\n", 2),
            ("FOREST v1\norder=2 depth=2 trunk=1 attrs=a color=red\n", 2),
            ("FOREST v1\norder=1 depth=2 trunk=1 attrs=a\n", 2),
        ];
        for (text, line) in cases {
            assert!(matches!(parse_forest(text), Err(Error::Parse { line: l, .. }) if l == line), "{text}");
        }
        let bodies = [
            ("TREE id=x label=-\nEND\n", 3),                   // empty tree
            ("TREE id=x label=-\n1 1\n8 1\nEND\n", 5),         // unknown index
            ("TREE id=x label=-\n1 0\nEND\n", 4),              // nonpositive
            ("TREE id=x label=-\n1 1\n1 2\nEND\n", 5),         // duplicate
            ("TREE id=x label=-\n1 1\n", 3),                   // missing END
            ("TREE id=x label=-\n1 1\n4 1\nEND\n", 3),         // disconnected
            ("1 1\n", 3),                                      // branch outside TREE
        ];
        for (body, line) in bodies {
            let err = parse_forest(&format!("{head}{body}")).unwrap_err();
            assert!(matches!(err, Error::Parse { line: l, .. } if l == line), "{body}: {err}");
        }
    }

    #[test]
    fn writer_rejects_unserializable_ids() {
        let mut f = sample();
        f.trees[0] = f.trees[0].clone().with_label(Some("-".into()));
        assert!(format_forest(&f).is_err());
        let mut f = sample();
        f.attr_names[0] = "bad name".into();
        assert!(format_forest(&f).is_err());
    }

    #[test]
    fn matrix_csv_body_and_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix_csv(&DMatrix::identity(2, 2), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "c1,c2\n1,0\n0,1\n");
        let m = DMatrix::from_fn(3, 4, |i, j| (i as f64 + 0.1) / (j as f64 + 0.7));
        write_matrix_csv(&m, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert!((back - m).abs().max() <= 1e-12);
    }

    #[test]
    fn labels_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        write_labels_csv(&["t1".into(), "t2".into()], &[0, 1], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "id,cluster\nt1,0\nt2,1\n");
        assert_eq!(read_labels_csv(&path).unwrap(), (vec!["t1".into(), "t2".into()], vec![0, 1]));
        assert!(write_labels_csv(&["t1".into()], &[0, 1], &path).is_err());
    }
}
