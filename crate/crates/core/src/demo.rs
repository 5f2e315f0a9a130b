//! Shipped example computations and the fixture files they run on.
//!
//! Each demo returns its report as text; the CLI prints it verbatim and the
//! test suite compares it against committed golden files.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Deserialize;

use crate::cfun::CFunction;
use crate::error::Error;
use crate::io::{parse_geometry, DocError, Document, Workspace};
use crate::kring::{RingModel, RingValue};
use crate::ksheaf::{chi_of_cellwise, CellwiseComplex};
use crate::xform::{radon_pair, transform};

pub mod fixtures {
    pub const EX22_DISC: &str = include_str!("../fixtures/ex22_disc.json");
    pub const EX22_SOL: &str = include_str!("../fixtures/ex22_sol.json");
    pub const P1: &str = include_str!("../fixtures/p1.json");
    pub const INTERVAL: &str = include_str!("../fixtures/interval.json");
    pub const CLOSED_E: &str = include_str!("../fixtures/closed_e.json");
    pub const OPEN_CELLS_E: &str = include_str!("../fixtures/open_cells_e.json");
    pub const FANO: &str = include_str!("../fixtures/fano.json");
    pub const P1RING: &str = include_str!("../fixtures/p1ring.json");
    pub const FM: &str = include_str!("../fixtures/fm.json");

    /// All document fixtures.
    pub const DOCUMENTS: [&str; 6] = [EX22_DISC, EX22_SOL, P1, INTERVAL, CLOSED_E, OPEN_CELLS_E];
}

pub const DEMOS: [&str; 4] = ["ex22", "p1ring", "fm", "radon-fano"];

/// Workspace holding every shipped document fixture.
pub fn fixture_workspace() -> Workspace {
    let mut ws = Workspace::new();
    for text in fixtures::DOCUMENTS {
        ws.add(Document::parse(text).expect("fixture parses"))
            .expect("fixture names are unique");
    }
    ws
}

/// The cellwise complex of the solution sheaf on the disc.
pub fn ex22_cellwise() -> Result<CellwiseComplex, DocError> {
    let ws = fixture_workspace();
    match Document::parse(fixtures::EX22_SOL)? {
        Document::Cellwise { body, .. } => ws.cellwise(&body),
        other => Err(DocError::WrongKind {
            expected: "cellwise",
            got: other.kind(),
        }),
    }
}

pub fn run(name: &str) -> Result<String, DocError> {
    match name {
        "ex22" => ex22(),
        "p1ring" => p1ring(),
        "fm" => fm(),
        "radon-fano" => radon_fano(),
        other => Err(Error::Document(format!(
            "unknown demo `{other}` (expected one of {})",
            DEMOS.join(", ")
        ))
        .into()),
    }
}

fn ex22() -> Result<String, DocError> {
    let cellwise = ex22_cellwise()?;
    let chi = chi_of_cellwise(&cellwise);
    let complex = chi.complex();
    let mut out = String::new();
    writeln!(
        out,
        "disc: {} cells, euler characteristic {}",
        complex.len(),
        complex.euler_characteristic()
    )
    .unwrap();
    writeln!(out, "cell dim chi").unwrap();
    for c in complex.cells() {
        writeln!(out, "{} {} {}", complex.id(c), complex.dim(c), chi.at(c)).unwrap();
    }
    let center = complex.index_of("o")?;
    let center_value = chi.at(center);
    let others: Vec<&RingValue> = complex
        .cells()
        .filter(|&c| c != center)
        .map(|c| chi.at(c))
        .collect();
    let elsewhere = if others.windows(2).all(|w| w[0] == w[1]) {
        others.first().map_or("-".to_owned(), |v| v.to_string())
    } else {
        "varies".to_owned()
    };
    let center_text = if center_value.is_zero() {
        "0".to_owned()
    } else {
        center_value.to_string()
    };
    writeln!(
        out,
        "chi at center = {center_text}, elsewhere = {elsewhere}; integral = {}",
        chi.integrate()
    )
    .unwrap();
    Ok(out)
}

#[derive(Deserialize)]
struct P1RingParams {
    ring: RingModel,
    products: Vec<(Vec<i64>, Vec<i64>)>,
    duals: Vec<Vec<i64>>,
}

fn p1ring() -> Result<String, DocError> {
    let params: P1RingParams =
        serde_json::from_str(fixtures::P1RING).map_err(|e| DocError::Parse {
            message: e.to_string(),
            line: e.line(),
            column: e.column(),
        })?;
    let ring = Arc::new(params.ring);
    let mut out = String::new();
    writeln!(out, "ring {ring}, unit = {}", RingValue::one(&ring)).unwrap();
    for (a, b) in &params.products {
        let (x, y) = (
            RingValue::new(&ring, a.clone())?,
            RingValue::new(&ring, b.clone())?,
        );
        let product = x.mul(&y)?;
        // rank-one shortcut (ac, b+d)
        let shortcut = RingValue::new(&ring, vec![a[0] * b[0], a[1] + b[1]])?;
        let note = if shortcut == product {
            "agrees"
        } else {
            "differs"
        };
        writeln!(out, "{x} * {y} = {product}; (ac, b+d) = {shortcut} {note}").unwrap();
    }
    for a in &params.duals {
        let x = RingValue::new(&ring, a.clone())?;
        writeln!(
            out,
            "dual {x} = {}; dual dual = {}",
            x.dual(),
            x.dual().dual()
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Deserialize)]
struct FmParams {
    ring: RingModel,
    bound: i64,
}

fn fm() -> Result<String, DocError> {
    let params: FmParams = serde_json::from_str(fixtures::FM).map_err(|e| DocError::Parse {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    let ring = Arc::new(params.ring);
    let b = params.bound;
    let mut out = String::new();
    writeln!(out, "x -> fm(x) -> fm(fm(x))").unwrap();
    let mut all = true;
    for r in -b..=b {
        for d in -b..=b {
            let x = RingValue::new(&ring, vec![r, d])?;
            let once = x.fm()?;
            let twice = once.fm()?;
            all &= twice == x.neg();
            writeln!(out, "{x} -> {once} -> {twice}").unwrap();
        }
    }
    writeln!(
        out,
        "fm^2 = -id on all {} elements: {all}",
        (2 * b + 1) * (2 * b + 1)
    )
    .unwrap();
    Ok(out)
}

fn radon_fano() -> Result<String, DocError> {
    let geometry = parse_geometry(fixtures::FANO)?;
    let ring = Arc::new(RingModel::projective_line());
    let pair = radon_pair(&geometry, &ring)?;
    let matrix = pair.composite_matrix()?;
    let mut out = String::new();
    writeln!(
        out,
        "Fano plane: {} points, {} lines; K = unit on non-incident pairs",
        geometry.points(),
        geometry.lines().len()
    )
    .unwrap();
    writeln!(
        out,
        "composite Phi_K' Phi_K (row = target point, column = source point):"
    )
    .unwrap();
    writeln!(out, "{}", matrix.cols.join(" ")).unwrap();
    for (row, entries) in matrix.rows.iter().zip(&matrix.entries) {
        let cells: Vec<String> = entries.iter().map(ToString::to_string).collect();
        writeln!(out, "{row}: {}", cells.join(" ")).unwrap();
    }
    let points = pair.forward.left();
    let constant = CFunction::one(points, &ring);
    let image = transform(&pair.backward, &transform(&pair.forward, &constant)?)?;
    let first = image.at(0).clone();
    if image.values().iter().all(|v| *v == first) {
        writeln!(out, "on the constant function 1: constant {first}").unwrap();
    } else {
        writeln!(out, "on the constant function 1: not constant").unwrap();
    }
    Ok(out)
}
