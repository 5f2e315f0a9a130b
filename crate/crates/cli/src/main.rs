//! `relcf`: command-line front end for relative constructible functions.
//!
//! Document arguments are either paths to JSON documents or names of
//! documents in the workspace directory. Output is canonical JSON (compact,
//! keys sorted) except for `demo`, which prints its report text. Failures
//! print `{"error":{...}}` on stdout and exit with status 1.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relcf_core::io::{
    canonical, function_document, normal_form_json, read_document, DocError, Document, Workspace,
};
use relcf_core::ksheaf::{chi_of_cellwise, k_equal, normal_form};
use relcf_core::xform::transform;
use relcf_core::{demo, RingModel};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "relcf",
    version,
    about = "Relative constructible functions, Euler-Poincare indices and kernel transforms"
)]
struct Cli {
    /// Directory of named documents used to resolve references.
    #[arg(long, global = true, env = "RELCF_WORKSPACE", value_name = "DIR")]
    workspace: Option<PathBuf>,

    /// Ring for documents that do not name one (a ring document or a bare ring model).
    #[arg(long, global = true, value_name = "FILE")]
    ring: Option<PathBuf>,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse documents and check their invariants.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Euler-Poincare index of a cellwise complex, as a function document.
    Index { cellwise: String },
    /// Integral of a function document, as a ring value.
    Integrate { function: String },
    /// Apply a kernel to a function on its left factor.
    Transform { kernel: String, function: String },
    /// Canonical normal form of a virtual sheaf.
    NormalForm { vsheaf: String },
    /// Whether two virtual sheaves have the same class.
    Eq { left: String, right: String },
    /// Run a shipped example.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(demo::DEMOS))]
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Validate { paths } = &cli.command {
        return validate(&cli, paths);
    }
    match run(&cli) {
        Ok(text) => emit(&cli, text),
        Err(e) => fail(&e),
    }
}

fn emit(cli: &Cli, text: String) -> ExitCode {
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&DocError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
        },
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn fail(e: &DocError) -> ExitCode {
    report(e, None)
}

fn report(e: &DocError, path: Option<&Path>) -> ExitCode {
    let mut obj = e.to_json();
    if let (Some(path), Some(inner)) = (path, obj.get_mut("error").and_then(|v| v.as_object_mut()))
    {
        inner
            .entry("path")
            .or_insert_with(|| path.display().to_string().into());
    }
    println!("{}", canonical(&obj));
    ExitCode::FAILURE
}

fn run(cli: &Cli) -> Result<String, DocError> {
    if let Command::Demo { name } = &cli.command {
        return demo::run(name);
    }
    let mut ctx = Context::open(cli)?;
    let out = match &cli.command {
        Command::Validate { .. } => unreachable!("handled in main"),
        Command::Index { cellwise } => {
            let (name, body) = match ctx.load(cellwise)? {
                Document::Cellwise { name, body } => (name, body),
                other => return Err(wrong_kind("cellwise", &other)),
            };
            let f = chi_of_cellwise(&ctx.ws.cellwise(&body)?);
            function_document(&format!("chi_{name}"), body.complex, body.ring, &f).to_canonical()
        }
        Command::Integrate { function } => {
            let body = match ctx.load(function)? {
                Document::Function { body, .. } => body,
                other => return Err(wrong_kind("function", &other)),
            };
            canonical(&ctx.ws.function(&body)?.integrate())
        }
        Command::Transform { kernel, function } => {
            let (kname, kbody) = match ctx.load(kernel)? {
                Document::Kernel { name, body } => (name, body),
                other => return Err(wrong_kind("kernel", &other)),
            };
            let (fname, fbody) = match ctx.load(function)? {
                Document::Function { name, body } => (name, body),
                other => return Err(wrong_kind("function", &other)),
            };
            let k = ctx.ws.kernel(&kbody)?;
            let phi = ctx.ws.function(&fbody)?;
            let out = transform(&k, &phi)?;
            let ring = kbody.ring.or(fbody.ring);
            function_document(&format!("{kname}_{fname}"), kbody.right, ring, &out).to_canonical()
        }
        Command::NormalForm { vsheaf } => {
            let body = match ctx.load(vsheaf)? {
                Document::Vsheaf { body, .. } => body,
                other => return Err(wrong_kind("vsheaf", &other)),
            };
            canonical(&normal_form_json(&normal_form(&ctx.ws.vsheaf(&body)?)))
        }
        Command::Eq { left, right } => {
            let mut sheaves = Vec::new();
            for arg in [left, right] {
                match ctx.load(arg)? {
                    Document::Vsheaf { body, .. } => sheaves.push(ctx.ws.vsheaf(&body)?),
                    other => return Err(wrong_kind("vsheaf", &other)),
                }
            }
            canonical(&k_equal(&sheaves[0], &sheaves[1])?)
        }
        Command::Demo { .. } => unreachable!("handled above"),
    };
    Ok(out + "\n")
}

fn wrong_kind(expected: &'static str, got: &Document) -> DocError {
    DocError::WrongKind {
        expected,
        got: got.kind(),
    }
}

/// Loads every path first so documents may reference each other, then checks
/// each one. The first failure is reported together with its path.
fn validate(cli: &Cli, paths: &[PathBuf]) -> ExitCode {
    let mut ctx = match Context::open(cli) {
        Ok(ctx) => ctx,
        Err(e) => return fail(&e),
    };
    let mut docs = Vec::new();
    for path in paths {
        match ctx.load_path(path) {
            Ok(doc) => docs.push((path, doc)),
            Err(e) => return report(&e, Some(path)),
        }
    }
    let mut valid = Vec::new();
    for (path, doc) in docs {
        if let Err(e) = ctx.ws.check(&doc) {
            return report(&e, Some(path));
        }
        valid.push(
            json!({ "path": path.display().to_string(), "kind": doc.kind(), "name": doc.name() }),
        );
    }
    emit(cli, canonical(&json!({ "valid": valid })) + "\n")
}

struct Context {
    ws: Workspace,
}

impl Context {
    fn open(cli: &Cli) -> Result<Self, DocError> {
        let dir = cli
            .workspace
            .clone()
            .or_else(|| first_file_dir(&cli.command));
        let mut ws = match dir {
            Some(dir) => Workspace::open(&dir)?,
            None => Workspace::new(),
        };
        if let Some(path) = &cli.ring {
            ws.set_default_ring(read_ring(path)?);
        }
        Ok(Self { ws })
    }

    /// A file path if one exists, otherwise a workspace document name.
    fn load(&mut self, arg: &str) -> Result<Document, DocError> {
        let path = Path::new(arg);
        if path.is_file() {
            return self.load_path(path);
        }
        self.ws
            .get(arg)
            .cloned()
            .ok_or_else(|| DocError::Unresolved {
                kind: "document",
                name: arg.to_owned(),
            })
    }

    fn load_path(&mut self, path: &Path) -> Result<Document, DocError> {
        let doc = read_document(path)?;
        if self.ws.get(doc.name()) != Some(&doc) {
            let key = std::fs::canonicalize(path).unwrap_or_else(|_| path.to_owned());
            self.ws.insert(key, doc.clone())?;
        }
        Ok(doc)
    }
}

fn first_file_dir(command: &Command) -> Option<PathBuf> {
    let args: Vec<&Path> = match command {
        Command::Validate { paths } => paths.iter().map(PathBuf::as_path).collect(),
        Command::Index { cellwise: a }
        | Command::Integrate { function: a }
        | Command::NormalForm { vsheaf: a } => {
            vec![Path::new(a)]
        }
        Command::Transform {
            kernel: a,
            function: b,
        }
        | Command::Eq { left: a, right: b } => {
            vec![Path::new(a), Path::new(b)]
        }
        Command::Demo { .. } => vec![],
    };
    args.into_iter().find(|p| p.is_file()).map(|p| {
        p.parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."))
            .to_owned()
    })
}

/// Accepts a ring document or a bare ring model.
fn read_ring(path: &Path) -> Result<RingModel, DocError> {
    let text = std::fs::read_to_string(path).map_err(|e| DocError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    match Document::parse(&text) {
        Ok(Document::Ring { body, .. }) => Ok(body),
        Ok(other) => Err(wrong_kind("ring", &other)),
        Err(doc_err) => serde_json::from_str::<RingModel>(&text).map_err(|_| doc_err),
    }
}
