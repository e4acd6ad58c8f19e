//! Plain-text trace documents: a complete, re-checkable record of one
//! driver run. A document carries the instance, the map descriptor, every
//! stage with its iterates and step distances, the derived ball chain, the
//! outcome, and a validation verdict.
//!
//! ```text
//! ultrafix-trace v1
//! instance padic
//! p 7
//! precision 2
//! end-instance
//! map newton x^2-2
//! stage 0 start
//! point 3
//! sigma natexp:1
//! point 10
//! end-stage
//! outcome reached stage=0 step=1 point=10
//! balls
//! ball 3 natexp:1
//! end-balls
//! validation ok
//! ```
//!
//! Emission is canonical: parsing an emitted document and emitting it
//! again reproduces the same bytes. Re-validation recomputes everything
//! the document claims — step images, recorded distances, the decreasing
//! chain, ball membership and nesting, the outcome, the ball section, and
//! the verdict line — so any tampering shows up as a violation.

use std::fmt::Write as _;

use crate::apps::{NewtonMap, PicardOp};
use crate::cli::expr;
use crate::cli::instance_file::{
    emit_instance_into, parse_instance_block, significant_lines, FileError, LoadedInstance,
};
use crate::driver::{
    check_strict_contraction, validate_trace, verify_fixed_point, ContractingMap, Outcome,
    StageEntry, StageSegment, Trace,
};
use crate::instances::{
    FiniteSpace, LexAffineMap, LexSeriesQ, LexSeriesSpace, PadicInt, PadicSpace, SeriesQ,
    SeriesSpace, TableMap,
};
use crate::radius::{LexRadius, NatExpRadius, PosetRadius, RadiusOrder};
use crate::report::Report;
use crate::space::{RadiusOf, Ultrametric};

pub const HEADER: &str = "ultrafix-trace v1";

// ── typed runs ──────────────────────────────────────────────────────────

/// A run outcome paired with the space and map it belongs to, one variant
/// per bundled instance kind.
#[derive(Debug, Clone)]
pub enum TypedRun {
    Finite { space: FiniteSpace, map: TableMap, outcome: Outcome<usize, PosetRadius> },
    Padic { space: PadicSpace, map: NewtonMap, outcome: Outcome<PadicInt, NatExpRadius> },
    Series { space: SeriesSpace, map: PicardOp, outcome: Outcome<SeriesQ, NatExpRadius> },
    Lex { space: LexSeriesSpace, map: LexAffineMap, outcome: Outcome<LexSeriesQ, LexRadius> },
}

impl TypedRun {
    /// One line naming the space and the map, for command output.
    pub fn describe(&self) -> String {
        match self {
            TypedRun::Finite { space, map, .. } => {
                format!("{} under {}", space.describe(), map.describe())
            }
            TypedRun::Padic { space, map, .. } => {
                format!("{} under {}", space.describe(), map.describe())
            }
            TypedRun::Series { space, map, .. } => {
                format!("{} under {}", space.describe(), map.describe())
            }
            TypedRun::Lex { space, map, .. } => {
                format!("{} under {}", space.describe(), map.describe())
            }
        }
    }
}

/// A parsed document: the typed run plus the sections the document
/// asserted, kept for consistency checking against recomputation.
#[derive(Debug, Clone)]
pub struct ParsedDoc {
    pub run: TypedRun,
    ball_lines: Vec<String>,
    claims_clean: bool,
}

// ── emission ────────────────────────────────────────────────────────────

/// The canonical document text for a run, newline-terminated.
pub fn emit_document(run: &TypedRun) -> String {
    match run {
        TypedRun::Finite { space, map, outcome } => {
            emit_body(&LoadedInstance::Finite(space.clone()), space, map, outcome)
        }
        TypedRun::Padic { space, map, outcome } => {
            emit_body(&LoadedInstance::Padic(space.clone()), space, map, outcome)
        }
        TypedRun::Series { space, map, outcome } => {
            emit_body(&LoadedInstance::Series(space.clone()), space, map, outcome)
        }
        TypedRun::Lex { space, map, outcome } => {
            emit_body(&LoadedInstance::Lex(space.clone()), space, map, outcome)
        }
    }
}

fn emit_body<S, M>(
    instance: &LoadedInstance,
    space: &S,
    map: &M,
    outcome: &Outcome<S::Point, RadiusOf<S>>,
) -> String
where
    S: Ultrametric,
    M: ContractingMap<S>,
{
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    emit_instance_into(&mut out, instance);
    writeln!(out, "map {}", map.describe()).unwrap();
    let trace = outcome.trace();
    for (k, seg) in trace.stages.iter().enumerate() {
        writeln!(out, "stage {k} {}", seg.entry).unwrap();
        for (i, p) in seg.points.iter().enumerate() {
            writeln!(out, "point {}", space.encode_point(p)).unwrap();
            if let Some(sigma) = seg.sigmas.get(i) {
                writeln!(out, "sigma {sigma}").unwrap();
            }
        }
        writeln!(out, "end-stage").unwrap();
    }
    match outcome {
        Outcome::Reached { point, stage_index, step_index, .. } => {
            writeln!(
                out,
                "outcome reached stage={stage_index} step={step_index} point={}",
                space.encode_point(point)
            )
            .unwrap();
        }
        Outcome::Approximated { point, .. } => {
            writeln!(out, "outcome approximated point={}", space.encode_point(point)).unwrap();
        }
        Outcome::Inconclusive { .. } => {
            writeln!(out, "outcome inconclusive").unwrap();
        }
    }
    writeln!(out, "balls").unwrap();
    for line in ball_section(space, outcome) {
        writeln!(out, "ball {line}").unwrap();
    }
    writeln!(out, "end-balls").unwrap();
    let report = runtime_report(space, map, outcome);
    if report.is_clean() {
        writeln!(out, "validation ok").unwrap();
    } else {
        writeln!(out, "validation failed").unwrap();
        for v in report.violations() {
            writeln!(out, "violation {} {}", v.rule, v.detail).unwrap();
        }
    }
    out
}

fn ball_section<S: Ultrametric>(
    space: &S,
    outcome: &Outcome<S::Point, RadiusOf<S>>,
) -> Vec<String> {
    outcome
        .trace()
        .balls()
        .iter()
        .map(|b| format!("{} {}", space.encode_point(&b.center), b.radius))
        .collect()
}

// ── recomputation ───────────────────────────────────────────────────────

/// Everything checkable about a run given only the space, map, and
/// outcome: the full trace validation, agreement between the outcome and
/// the trace, and a strict-contraction spot check over the points the
/// run visited.
fn runtime_report<S, M>(space: &S, map: &M, outcome: &Outcome<S::Point, RadiusOf<S>>) -> Report
where
    S: Ultrametric,
    M: ContractingMap<S>,
{
    let trace = outcome.trace();
    let mut report = validate_trace(space, map, trace);

    match outcome {
        Outcome::Reached { point, stage_index, step_index, .. } => {
            match trace.stages.get(*stage_index) {
                Some(seg) if seg.points.get(*step_index) == Some(point) => {
                    if *step_index + 1 != seg.points.len() {
                        report.push(
                            "outcome-consistency",
                            format!("reached at step {step_index} but the stage continues past it"),
                        );
                    }
                    if !seg.reached {
                        report.push(
                            "outcome-consistency",
                            format!("stage {stage_index} is not marked reached"),
                        );
                    }
                }
                _ => report.push(
                    "outcome-consistency",
                    format!("reached point is not recorded at stage {stage_index} step {step_index}"),
                ),
            }
            if *stage_index + 1 != trace.stages.len() {
                report.push(
                    "outcome-consistency",
                    format!("reached at stage {stage_index} but the trace has later stages"),
                );
            }
            if !verify_fixed_point(space, map, point) {
                report.push("outcome-consistency", "reached point is not fixed under the map");
            }
        }
        Outcome::Approximated { point, .. } => {
            if !verify_fixed_point(space, map, point) {
                report.push("outcome-consistency", "approximated point is not fixed under the map");
            }
            let order = space.order();
            for (center, radius) in trace.entries() {
                if !order.le(&space.distance(point, center), radius) {
                    report.push(
                        "outcome-consistency",
                        format!(
                            "approximated point leaves the recorded ball around {}",
                            space.encode_point(center)
                        ),
                    );
                }
            }
            if trace.stages.iter().any(|s| s.reached) {
                report.push(
                    "outcome-consistency",
                    "a stage is marked reached but the outcome is approximated",
                );
            }
        }
        Outcome::Inconclusive { .. } => {
            if trace.stages.iter().any(|s| s.reached) {
                report.push(
                    "outcome-consistency",
                    "a stage is marked reached but the outcome is inconclusive",
                );
            }
        }
    }

    // Spot-check strict contraction on pairs the run actually visited;
    // maps like the Newton step are only defined on the ball their run
    // inhabits, so sampling the whole space would leave it.
    let mut points = trace.family();
    if let Some(p) = outcome.point() {
        if !points.contains(p) {
            points.push(p.clone());
        }
    }
    let mut pairs = Vec::new();
    'outer: for i in 0..points.len() {
        for j in i + 1..points.len() {
            pairs.push((points[i].clone(), points[j].clone()));
            if pairs.len() >= 40 {
                break 'outer;
            }
        }
    }
    report.merge(check_strict_contraction(space, map, &pairs));
    report
}

/// Re-check a document end to end. Clean means: the trace validates, the
/// outcome agrees with the trace, the map contracts on sampled pairs, and
/// the document's own ball section and verdict match recomputation.
pub fn revalidate(text: &str) -> Result<Report, FileError> {
    parse_document(text).map(|doc| doc.report())
}

impl ParsedDoc {
    /// Recompute everything the document claims and report mismatches.
    pub fn report(&self) -> Report {
        match &self.run {
            TypedRun::Finite { space, map, outcome } => self.document_report(space, map, outcome),
            TypedRun::Padic { space, map, outcome } => self.document_report(space, map, outcome),
            TypedRun::Series { space, map, outcome } => self.document_report(space, map, outcome),
            TypedRun::Lex { space, map, outcome } => self.document_report(space, map, outcome),
        }
    }

    fn document_report<S, M>(
        &self,
        space: &S,
        map: &M,
        outcome: &Outcome<S::Point, RadiusOf<S>>,
    ) -> Report
    where
        S: Ultrametric,
        M: ContractingMap<S>,
    {
        let mut report = runtime_report(space, map, outcome);
        let run_clean = report.is_clean();
        let recomputed = ball_section(space, outcome);
        let balls_ok = self.ball_lines == recomputed;
        if self.ball_lines.len() != recomputed.len() {
            report.push(
                "document-balls",
                format!(
                    "ball section lists {} entries but the trace yields {}",
                    self.ball_lines.len(),
                    recomputed.len()
                ),
            );
        }
        for (i, (doc_line, real)) in self.ball_lines.iter().zip(recomputed.iter()).enumerate() {
            if doc_line != real {
                report.push(
                    "document-balls",
                    format!("ball {i} reads {doc_line:?} but recomputes to {real:?}"),
                );
            }
        }
        let actually_clean = run_clean && balls_ok;
        if self.claims_clean != actually_clean {
            report.push(
                "document-validation",
                format!(
                    "document claims validation {} but recomputation says {}",
                    if self.claims_clean { "ok" } else { "failed" },
                    if actually_clean { "ok" } else { "failed" },
                ),
            );
        }
        report
    }
}

// ── parsing ─────────────────────────────────────────────────────────────

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn parse_error(&self, detail: impl Into<String>) -> FileError {
        let line = if self.pos < self.lines.len() {
            self.lines[self.pos].0
        } else {
            self.lines.last().map(|(no, _)| *no).unwrap_or(1)
        };
        FileError::Parse { line, detail: detail.into() }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, l)| *l)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FileError> {
        let got = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.parse_error(format!("document ends where {what} was expected")))?;
        self.pos += 1;
        Ok(got)
    }

    /// Consume a line of the form `<key> <rest>`, returning the rest.
    fn keyword(&mut self, key: &str) -> Result<(usize, &'a str), FileError> {
        let (no, line) = self.next(key)?;
        match line.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                Ok((no, rest.trim_start()))
            }
            _ => Err(FileError::Parse {
                line: no,
                detail: format!("expected a {key} line, found {line:?}"),
            }),
        }
    }
}

/// Parse a document into its typed run and asserted sections.
pub fn parse_document(text: &str) -> Result<ParsedDoc, FileError> {
    let mut cursor = Cursor { lines: significant_lines(text), pos: 0 };
    let (_, header) = cursor.next("the header")?;
    if header != HEADER {
        return Err(FileError::Parse {
            line: cursor.lines[0].0,
            detail: format!("expected {HEADER:?}, found {header:?}"),
        });
    }
    let (instance, used) = parse_instance_block(&cursor.lines[cursor.pos..])?;
    cursor.pos += used;
    match instance {
        LoadedInstance::Finite(space) => parse_body(cursor, space, |space, no, desc| {
            parse_selfmap(space, no, desc)
        })
        .map(|(space, map, outcome, balls, ok)| ParsedDoc {
            run: TypedRun::Finite { space, map, outcome },
            ball_lines: balls,
            claims_clean: ok,
        }),
        LoadedInstance::Padic(space) => {
            parse_body(cursor, space, |_, no, desc| parse_newton(no, desc)).map(
                |(space, map, outcome, balls, ok)| ParsedDoc {
                    run: TypedRun::Padic { space, map, outcome },
                    ball_lines: balls,
                    claims_clean: ok,
                },
            )
        }
        LoadedInstance::Series(space) => {
            parse_body(cursor, space, |_, no, desc| parse_picard(no, desc)).map(
                |(space, map, outcome, balls, ok)| ParsedDoc {
                    run: TypedRun::Series { space, map, outcome },
                    ball_lines: balls,
                    claims_clean: ok,
                },
            )
        }
        LoadedInstance::Lex(space) => parse_body(cursor, space, |space, no, desc| {
            parse_affine(space, no, desc)
        })
        .map(|(space, map, outcome, balls, ok)| ParsedDoc {
            run: TypedRun::Lex { space, map, outcome },
            ball_lines: balls,
            claims_clean: ok,
        }),
    }
}

type ParsedBody<S, M> = (S, M, Outcome<<S as Ultrametric>::Point, RadiusOf<S>>, Vec<String>, bool);

fn parse_body<S, M, F>(
    mut cursor: Cursor<'_>,
    space: S,
    parse_map: F,
) -> Result<ParsedBody<S, M>, FileError>
where
    S: Ultrametric,
    M: ContractingMap<S>,
    F: FnOnce(&S, usize, &str) -> Result<M, FileError>,
{
    let (map_no, map_desc) = cursor.keyword("map")?;
    let map = parse_map(&space, map_no, map_desc)?;

    let mut stages: Vec<StageSegment<S::Point, RadiusOf<S>>> = Vec::new();
    while cursor.peek().is_some_and(|l| l.starts_with("stage")) {
        let (no, rest) = cursor.keyword("stage")?;
        let mut toks = rest.split_whitespace();
        let idx: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| FileError::Parse { line: no, detail: "stage needs an index".into() })?;
        if idx != stages.len() {
            return Err(FileError::Parse {
                line: no,
                detail: format!("stage {idx} out of order, expected {}", stages.len()),
            });
        }
        let entry = match toks.next() {
            Some("start") => StageEntry::Start,
            Some("oracle") => StageEntry::OracleChoice,
            other => {
                return Err(FileError::Parse {
                    line: no,
                    detail: format!("stage entry must be start or oracle, found {other:?}"),
                })
            }
        };
        let mut points = Vec::new();
        let mut sigmas = Vec::new();
        let (no, first) = cursor.keyword("point")?;
        points.push(decode_point_at(&space, no, first)?);
        loop {
            match cursor.peek() {
                Some("end-stage") => {
                    cursor.next("end-stage")?;
                    break;
                }
                Some(l) if l.starts_with("sigma") => {
                    let (no, tag) = cursor.keyword("sigma")?;
                    let sigma = space
                        .order()
                        .decode(tag)
                        .map_err(|e| FileError::Parse { line: no, detail: e })?;
                    sigmas.push(sigma);
                    let (no, enc) = cursor.keyword("point")?;
                    points.push(decode_point_at(&space, no, enc)?);
                }
                _ => return Err(cursor.parse_error("expected sigma or end-stage")),
            }
        }
        stages.push(StageSegment { entry, points, sigmas, reached: false });
    }
    if stages.is_empty() {
        return Err(cursor.parse_error("document records no stages"));
    }

    let (outcome_no, outcome_rest) = cursor.keyword("outcome")?;
    let mut trace = Trace { model: space.describe(), stages };
    let outcome = {
        let mut toks = outcome_rest.split_whitespace();
        match toks.next() {
            Some("reached") => {
                let stage_index: usize = field(outcome_no, toks.next(), "stage")?
                    .parse()
                    .map_err(|_| bad_field(outcome_no, "stage"))?;
                let step_index: usize = field(outcome_no, toks.next(), "step")?
                    .parse()
                    .map_err(|_| bad_field(outcome_no, "step"))?;
                let enc = field(outcome_no, toks.next(), "point")?;
                let point = decode_point_at(&space, outcome_no, enc)?;
                let seg = trace.stages.get_mut(stage_index).ok_or_else(|| FileError::Parse {
                    line: outcome_no,
                    detail: format!("outcome names stage {stage_index} beyond the trace"),
                })?;
                seg.reached = true;
                Outcome::Reached { point, stage_index, step_index, trace }
            }
            Some("approximated") => {
                let enc = field(outcome_no, toks.next(), "point")?;
                let point = decode_point_at(&space, outcome_no, enc)?;
                Outcome::Approximated { point, trace }
            }
            Some("inconclusive") => Outcome::Inconclusive { trace },
            other => {
                return Err(FileError::Parse {
                    line: outcome_no,
                    detail: format!("unknown outcome {other:?}"),
                })
            }
        }
    };

    cursor.keyword("balls")?;
    let mut ball_lines = Vec::new();
    while cursor.peek().is_some_and(|l| l.starts_with("ball ")) {
        let (_, rest) = cursor.keyword("ball")?;
        ball_lines.push(rest.to_string());
    }
    let (_, after) = cursor.next("end-balls")?;
    if after != "end-balls" {
        return Err(FileError::Parse {
            line: cursor.lines[cursor.pos - 1].0,
            detail: format!("expected end-balls, found {after:?}"),
        });
    }

    let (verdict_no, verdict) = cursor.keyword("validation")?;
    let claims_clean = match verdict {
        "ok" => true,
        "failed" => false,
        other => {
            return Err(FileError::Parse {
                line: verdict_no,
                detail: format!("validation verdict must be ok or failed, found {other:?}"),
            })
        }
    };
    while cursor.peek().is_some_and(|l| l.starts_with("violation")) {
        cursor.next("violation")?;
    }
    if let Some(extra) = cursor.peek() {
        return Err(cursor.parse_error(format!("unexpected content after the document: {extra:?}")));
    }
    Ok((space, map, outcome, ball_lines, claims_clean))
}

fn decode_point_at<S: Ultrametric>(
    space: &S,
    no: usize,
    enc: &str,
) -> Result<S::Point, FileError> {
    space.decode_point(enc).map_err(|e| FileError::Parse { line: no, detail: e })
}

fn field<'a>(no: usize, tok: Option<&'a str>, name: &str) -> Result<&'a str, FileError> {
    tok.and_then(|t| t.strip_prefix(name).and_then(|t| t.strip_prefix('=')))
        .ok_or_else(|| FileError::Parse {
            line: no,
            detail: format!("outcome needs a {name}=... field"),
        })
}

fn bad_field(no: usize, name: &str) -> FileError {
    FileError::Parse { line: no, detail: format!("outcome field {name} is not a number") }
}

// ── map descriptors ─────────────────────────────────────────────────────

fn parse_selfmap(space: &FiniteSpace, no: usize, desc: &str) -> Result<TableMap, FileError> {
    let rest = desc.strip_prefix("selfmap").ok_or_else(|| FileError::Parse {
        line: no,
        detail: format!("a finite instance needs a selfmap descriptor, found {desc:?}"),
    })?;
    let images = rest
        .split_whitespace()
        .map(|name| decode_point_at(space, no, name))
        .collect::<Result<Vec<usize>, _>>()?;
    TableMap::new(space, images).map_err(|e| FileError::Invalid { detail: e.to_string() })
}

fn parse_newton(no: usize, desc: &str) -> Result<NewtonMap, FileError> {
    let rest = desc.strip_prefix("newton ").ok_or_else(|| FileError::Parse {
        line: no,
        detail: format!("a padic instance needs a newton descriptor, found {desc:?}"),
    })?;
    let poly = expr::parse_int_poly(rest).map_err(|e| FileError::Parse { line: no, detail: e })?;
    Ok(NewtonMap::new(poly))
}

fn parse_picard(no: usize, desc: &str) -> Result<PicardOp, FileError> {
    let rest = desc.strip_prefix("picard ").ok_or_else(|| FileError::Parse {
        line: no,
        detail: format!("a series instance needs a picard descriptor, found {desc:?}"),
    })?;
    let (rhs_part, y0_part) =
        rest.split_once(" y0=").ok_or_else(|| FileError::Parse {
            line: no,
            detail: format!("picard descriptor needs rhs=... y0=..., found {rest:?}"),
        })?;
    let rhs_src = rhs_part.strip_prefix("rhs=").ok_or_else(|| FileError::Parse {
        line: no,
        detail: format!("picard descriptor needs rhs=..., found {rhs_part:?}"),
    })?;
    let rhs = expr::parse_poly2(rhs_src).map_err(|e| FileError::Parse { line: no, detail: e })?;
    let y0 = expr::parse_rational(y0_part)
        .map_err(|e| FileError::Parse { line: no, detail: e })?;
    Ok(PicardOp::new(rhs, y0))
}

fn parse_affine(space: &LexSeriesSpace, no: usize, desc: &str) -> Result<LexAffineMap, FileError> {
    let rest = desc.strip_prefix("affine ").ok_or_else(|| FileError::Parse {
        line: no,
        detail: format!("a lexseries instance needs an affine descriptor, found {desc:?}"),
    })?;
    let mut constant = None;
    let mut shift = None;
    let mut scale = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("const=") {
            constant = Some(decode_point_at(space, no, v)?);
        } else if let Some(v) = tok.strip_prefix("shift=") {
            let (m, n) = v.split_once(',').ok_or_else(|| FileError::Parse {
                line: no,
                detail: format!("shift needs m,n, found {v:?}"),
            })?;
            let m: u32 = m.parse().map_err(|_| FileError::Parse {
                line: no,
                detail: format!("bad shift {v:?}"),
            })?;
            let n: u32 = n.parse().map_err(|_| FileError::Parse {
                line: no,
                detail: format!("bad shift {v:?}"),
            })?;
            shift = Some((m, n));
        } else if let Some(v) = tok.strip_prefix("scale=") {
            scale =
                Some(expr::parse_rational(v).map_err(|e| FileError::Parse { line: no, detail: e })?);
        } else {
            return Err(FileError::Parse {
                line: no,
                detail: format!("unknown affine field {tok:?}"),
            });
        }
    }
    let (Some(constant), Some(shift), Some(scale)) = (constant, shift, scale) else {
        return Err(FileError::Parse {
            line: no,
            detail: "affine descriptor needs const=, shift=, and scale=".into(),
        });
    };
    LexAffineMap::new(constant, shift, scale)
        .map_err(|e| FileError::Invalid { detail: e.to_string() })
}
