//! Line-based description files for the bundled space kinds.
//!
//! A file holds one block, opened by `instance <kind>` and closed by
//! `end-instance`. Blank lines and `#` comments are allowed around and
//! inside a block in hand-written files; emitted files are canonical
//! (no comments, fixed key order) and parse back to the same bytes.
//!
//! ```text
//! instance finite          instance padic       instance series
//! order chain3             p 7                  cap 5
//! elements 0 1 2           precision 3          end-instance
//! below 0<1 0<2 1<2        end-instance
//! points a b c                                  instance lexseries
//! dist a b 2                                    cap-m 4
//! dist a c 2                                    cap-n 2
//! dist b c 1                                    end-instance
//! end-instance
//! ```
//!
//! All tokens are whitespace-free; `dist` radii are named by their order
//! element. Resolution failures (unknown names, unreadable numbers) are
//! parse errors; a file that reads cleanly but describes a broken space
//! (a distance table violating the transfer rule, an order without a
//! least element) is a validation error.

use std::fmt;

use crate::instances::{FiniteSpace, LexSeriesSpace, PadicSpace, SeriesSpace};
use crate::radius::{FinitePoset, RadiusOrder};
use crate::space::Ultrametric;

// ── errors ──────────────────────────────────────────────────────────────

/// How reading a file can fail: the text does not parse, or it parses
/// into an instance that fails its own checks.
#[derive(Debug)]
pub enum FileError {
    Parse { line: usize, detail: String },
    Invalid { detail: String },
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Parse { line, detail } => write!(f, "line {line}: {detail}"),
            FileError::Invalid { detail } => write!(f, "invalid instance: {detail}"),
        }
    }
}

impl std::error::Error for FileError {}

fn parse_err(line: usize, detail: impl Into<String>) -> FileError {
    FileError::Parse { line, detail: detail.into() }
}

fn invalid(err: impl fmt::Display) -> FileError {
    FileError::Invalid { detail: err.to_string() }
}

// ── parsed instances ────────────────────────────────────────────────────

/// One of the bundled space kinds, as read from a file.
#[derive(Debug, Clone)]
pub enum LoadedInstance {
    Finite(FiniteSpace),
    Padic(PadicSpace),
    Series(SeriesSpace),
    Lex(LexSeriesSpace),
}

impl LoadedInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedInstance::Finite(_) => "finite",
            LoadedInstance::Padic(_) => "padic",
            LoadedInstance::Series(_) => "series",
            LoadedInstance::Lex(_) => "lexseries",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LoadedInstance::Finite(s) => s.describe(),
            LoadedInstance::Padic(s) => s.describe(),
            LoadedInstance::Series(s) => s.describe(),
            LoadedInstance::Lex(s) => s.describe(),
        }
    }
}

// ── parsing ─────────────────────────────────────────────────────────────

/// Strip comments and blanks, keeping 1-based line numbers.
pub(crate) fn significant_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Parse one instance block starting at `lines[0]` (which must be the
/// `instance <kind>` line). Returns the instance and how many lines the
/// block consumed, including its `end-instance`.
pub(crate) fn parse_instance_block(
    lines: &[(usize, &str)],
) -> Result<(LoadedInstance, usize), FileError> {
    let (first_no, first) = *lines.first().ok_or_else(|| parse_err(1, "missing instance block"))?;
    let mut head = first.split_whitespace();
    if head.next() != Some("instance") {
        return Err(parse_err(first_no, format!("expected `instance <kind>`, found {first:?}")));
    }
    let kind = head
        .next()
        .ok_or_else(|| parse_err(first_no, "`instance` needs a kind"))?;
    if head.next().is_some() {
        return Err(parse_err(first_no, "trailing input after instance kind"));
    }
    let end = lines
        .iter()
        .position(|(_, l)| *l == "end-instance")
        .ok_or_else(|| parse_err(first_no, "unterminated block: no end-instance"))?;
    let body = &lines[1..end];
    let instance = match kind {
        "finite" => parse_finite(first_no, body)?,
        "padic" => LoadedInstance::Padic(parse_padic(first_no, body)?),
        "series" => LoadedInstance::Series(parse_series(first_no, body)?),
        "lexseries" => LoadedInstance::Lex(parse_lexseries(first_no, body)?),
        other => return Err(parse_err(first_no, format!("unknown instance kind {other:?}"))),
    };
    Ok((instance, end + 1))
}

/// Parse a whole file holding exactly one instance block.
pub fn parse_instance_str(text: &str) -> Result<LoadedInstance, FileError> {
    let lines = significant_lines(text);
    let (instance, used) = parse_instance_block(&lines)?;
    if let Some((no, l)) = lines.get(used) {
        return Err(parse_err(*no, format!("unexpected content after end-instance: {l:?}")));
    }
    Ok(instance)
}

/// Key-value lines where each key may appear at most once.
struct KeyLines<'a> {
    seen: Vec<(&'a str, usize, &'a str)>,
    header_line: usize,
}

impl<'a> KeyLines<'a> {
    fn collect(
        header_line: usize,
        body: &[(usize, &'a str)],
        allowed: &[&str],
        repeatable: &[&str],
    ) -> Result<(Self, Vec<(usize, &'a str)>), FileError> {
        let mut seen: Vec<(&'a str, usize, &'a str)> = Vec::new();
        let mut repeats = Vec::new();
        for (no, line) in body {
            let key = line.split_whitespace().next().expect("blank lines were filtered");
            let rest = line[key.len()..].trim_start();
            if repeatable.contains(&key) {
                repeats.push((*no, rest));
            } else if allowed.contains(&key) {
                if seen.iter().any(|(k, _, _)| *k == key) {
                    return Err(parse_err(*no, format!("duplicate {key} line")));
                }
                seen.push((key, *no, rest));
            } else {
                return Err(parse_err(*no, format!("unknown key {key:?}")));
            }
        }
        Ok((KeyLines { seen, header_line }, repeats))
    }

    fn require(&self, key: &str) -> Result<(usize, &'a str), FileError> {
        self.seen
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, no, rest)| (*no, *rest))
            .ok_or_else(|| parse_err(self.header_line, format!("missing {key} line")))
    }

    fn optional(&self, key: &str) -> Option<(usize, &'a str)> {
        self.seen
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, no, rest)| (*no, *rest))
    }
}

fn parse_number<T: std::str::FromStr>(no: usize, key: &str, rest: &str) -> Result<T, FileError> {
    rest.trim()
        .parse()
        .map_err(|_| parse_err(no, format!("{key} needs a number, found {rest:?}")))
}

fn parse_finite(header: usize, body: &[(usize, &str)]) -> Result<LoadedInstance, FileError> {
    let (keys, dists) =
        KeyLines::collect(header, body, &["order", "elements", "below", "points"], &["dist"])?;
    let (_, order_name) = keys.require("order")?;
    let (el_no, elements_rest) = keys.require("elements")?;
    let elements: Vec<&str> = elements_rest.split_whitespace().collect();
    if elements.is_empty() {
        return Err(parse_err(el_no, "elements line names no elements"));
    }
    let mut below: Vec<(&str, &str)> = Vec::new();
    if let Some((no, rest)) = keys.optional("below") {
        for tok in rest.split_whitespace() {
            let (lo, hi) = tok
                .split_once('<')
                .ok_or_else(|| parse_err(no, format!("below pair {tok:?} is not `a<b`")))?;
            below.push((lo, hi));
        }
    }
    let order = FinitePoset::new(order_name.trim(), &elements, &below).map_err(invalid)?;

    let (pt_no, points_rest) = keys.require("points")?;
    let points: Vec<String> = points_rest.split_whitespace().map(str::to_string).collect();
    if points.is_empty() {
        return Err(parse_err(pt_no, "points line names no points"));
    }
    let point_index = |no: usize, name: &str| -> Result<usize, FileError> {
        points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| parse_err(no, format!("unknown point {name:?}")))
    };
    let mut upper = Vec::new();
    for (no, rest) in dists {
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let &[a, b, r] = toks.as_slice() else {
            return Err(parse_err(no, format!("dist needs `<point> <point> <radius>`, found {rest:?}")));
        };
        let i = point_index(no, a)?;
        let j = point_index(no, b)?;
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let radius = order
            .element(r)
            .ok_or_else(|| parse_err(no, format!("unknown order element {r:?}")))?;
        upper.push((i, j, radius));
    }
    FiniteSpace::from_table(order, points, &upper)
        .map(LoadedInstance::Finite)
        .map_err(invalid)
}

fn parse_padic(header: usize, body: &[(usize, &str)]) -> Result<PadicSpace, FileError> {
    let (keys, _) = KeyLines::collect(header, body, &["p", "precision"], &[])?;
    let (p_no, p_rest) = keys.require("p")?;
    let (n_no, n_rest) = keys.require("precision")?;
    let p: u64 = parse_number(p_no, "p", p_rest)?;
    let precision: u32 = parse_number(n_no, "precision", n_rest)?;
    PadicSpace::new(p, precision).map_err(invalid)
}

fn parse_series(header: usize, body: &[(usize, &str)]) -> Result<SeriesSpace, FileError> {
    let (keys, _) = KeyLines::collect(header, body, &["cap"], &[])?;
    let (no, rest) = keys.require("cap")?;
    SeriesSpace::new(parse_number(no, "cap", rest)?).map_err(invalid)
}

fn parse_lexseries(header: usize, body: &[(usize, &str)]) -> Result<LexSeriesSpace, FileError> {
    let (keys, _) = KeyLines::collect(header, body, &["cap-m", "cap-n"], &[])?;
    let (m_no, m_rest) = keys.require("cap-m")?;
    let (n_no, n_rest) = keys.require("cap-n")?;
    LexSeriesSpace::new(parse_number(m_no, "cap-m", m_rest)?, parse_number(n_no, "cap-n", n_rest)?)
        .map_err(invalid)
}

// ── emission ────────────────────────────────────────────────────────────

/// Canonical text for an instance, newline-terminated, parsing back to
/// an equal instance and re-emitting to the same bytes.
pub fn emit_instance(instance: &LoadedInstance) -> String {
    let mut out = String::new();
    emit_instance_into(&mut out, instance);
    out
}

pub(crate) fn emit_instance_into(out: &mut String, instance: &LoadedInstance) {
    use std::fmt::Write;
    match instance {
        LoadedInstance::Finite(s) => {
            let order = s.order();
            writeln!(out, "instance finite").unwrap();
            writeln!(out, "order {}", order.name()).unwrap();
            let elements: Vec<&str> = order.element_names().collect();
            writeln!(out, "elements {}", elements.join(" ")).unwrap();
            let mut pairs = Vec::new();
            for i in 0..order.len() {
                for j in 0..order.len() {
                    if i == j {
                        continue;
                    }
                    let (a, b) = (order.element_at(i), order.element_at(j));
                    if order.lt(&a, &b) {
                        pairs.push(format!("{}<{}", a.name(), b.name()));
                    }
                }
            }
            if !pairs.is_empty() {
                writeln!(out, "below {}", pairs.join(" ")).unwrap();
            }
            writeln!(out, "points {}", s.point_names().join(" ")).unwrap();
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    writeln!(
                        out,
                        "dist {} {} {}",
                        s.point_names()[i],
                        s.point_names()[j],
                        s.radius_between(i, j).name()
                    )
                    .unwrap();
                }
            }
            writeln!(out, "end-instance").unwrap();
        }
        LoadedInstance::Padic(s) => {
            writeln!(out, "instance padic").unwrap();
            writeln!(out, "p {}", s.p()).unwrap();
            writeln!(out, "precision {}", s.precision()).unwrap();
            writeln!(out, "end-instance").unwrap();
        }
        LoadedInstance::Series(s) => {
            writeln!(out, "instance series").unwrap();
            writeln!(out, "cap {}", s.cap()).unwrap();
            writeln!(out, "end-instance").unwrap();
        }
        LoadedInstance::Lex(s) => {
            writeln!(out, "instance lexseries").unwrap();
            writeln!(out, "cap-m {}", s.cap_m()).unwrap();
            writeln!(out, "cap-n {}", s.cap_n()).unwrap();
            writeln!(out, "end-instance").unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::Cmp;
    use crate::space::RadiusOf;

    const F3_FILE: &str = "\
instance finite
order chain3
elements 0 1 2
below 0<1 0<2 1<2
points a b c
dist a b 2
dist a c 2
dist b c 1
end-instance
";

    #[test]
    fn the_three_point_demo_file_loads_and_matches_the_builtin() {
        let loaded = parse_instance_str(F3_FILE).unwrap();
        let LoadedInstance::Finite(space) = &loaded else {
            panic!("expected a finite instance");
        };
        let builtin = FiniteSpace::f3();
        assert_eq!(space.point_names(), builtin.point_names());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    space.radius_between(i, j).name(),
                    builtin.radius_between(i, j).name(),
                    "distance ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn emission_is_canonical_and_round_trips() {
        let loaded = parse_instance_str(F3_FILE).unwrap();
        let emitted = emit_instance(&loaded);
        assert_eq!(emitted, F3_FILE, "the demo file is already canonical");
        let again = parse_instance_str(&emitted).unwrap();
        assert_eq!(emit_instance(&again), emitted);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let noisy = format!("# demo space\n\n{}\n# trailing note\n", F3_FILE);
        let loaded = parse_instance_str(&noisy).unwrap();
        assert_eq!(loaded.kind(), "finite");
    }

    #[test]
    fn numeric_instances_round_trip() {
        for text in [
            "instance padic\np 7\nprecision 3\nend-instance\n",
            "instance series\ncap 5\nend-instance\n",
            "instance lexseries\ncap-m 4\ncap-n 2\nend-instance\n",
        ] {
            let loaded = parse_instance_str(text).unwrap();
            assert_eq!(emit_instance(&loaded), text);
        }
    }

    #[test]
    fn diamond_orders_survive_the_round_trip() {
        let text = "\
instance finite
order diamond
elements 0 left right top
below 0<left 0<right 0<top left<top right<top
points x y z
dist x y left
dist x z right
dist y z top
end-instance
";
        let loaded = parse_instance_str(text).unwrap();
        assert_eq!(emit_instance(&loaded), text);
        let LoadedInstance::Finite(space) = &loaded else { panic!("expected finite") };
        let d_xy: RadiusOf<FiniteSpace> = space.distance(&0, &1);
        let d_xz = space.distance(&0, &2);
        assert_eq!(space.order().compare(&d_xy, &d_xz), Cmp::Incomparable);
    }

    #[test]
    fn resolution_failures_are_parse_errors() {
        let unknown_point = F3_FILE.replace("dist a b 2", "dist a q 2");
        let unknown_radius = F3_FILE.replace("dist a b 2", "dist a b 9");
        let bad_pair = F3_FILE.replace("below 0<1 0<2 1<2", "below 0:1");
        for text in [unknown_point, unknown_radius, bad_pair] {
            match parse_instance_str(&text) {
                Err(FileError::Parse { .. }) => {}
                other => panic!("expected a parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn broken_tables_and_orders_are_validation_errors() {
        // d(a,c) = 1 under d(a,b) = 2 breaks the transfer rule.
        let bad_table = F3_FILE.replace("dist a c 2", "dist a c 1");
        match parse_instance_str(&bad_table) {
            Err(FileError::Invalid { detail }) => {
                assert!(detail.contains("ultrametric-transfer"), "got {detail:?}")
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
        // Two minimal elements: no least element to act as zero.
        let no_zero = "\
instance finite
order vee
elements a b
points p q
dist p q a
end-instance
";
        match parse_instance_str(no_zero) {
            Err(FileError::Invalid { detail }) => assert!(detail.contains("least"), "got {detail:?}"),
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn structural_noise_is_a_parse_error() {
        for text in [
            "instance sphere\nend-instance\n",
            "instance padic\np 7\nprecision 3\n",
            "instance padic\np 7\np 7\nprecision 3\nend-instance\n",
            "instance padic\nprecision 3\nend-instance\n",
            "instance padic\np seven\nprecision 3\nend-instance\n",
            "instance padic\np 7\nprecision 3\nend-instance\nleftover\n",
            "instance padic\nwheels 4\np 7\nprecision 3\nend-instance\n",
            "",
        ] {
            match parse_instance_str(text) {
                Err(FileError::Parse { .. }) => {}
                other => panic!("{text:?}: expected a parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn missing_distances_are_validation_errors() {
        let text = "\
instance finite
order chain3
elements 0 1 2
below 0<1 1<2
points a b c
dist a b 2
end-instance
";
        match parse_instance_str(text) {
            Err(FileError::Invalid { detail }) => {
                assert!(detail.contains("no distance"), "got {detail:?}")
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }
}
