use thiserror::Error;

use super::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed gate line: {0}")]
    MalformedGate(String),
    #[error("unsupported gate kind {0}")]
    UnsupportedGate(String),
    #[error("{kind} takes {expected} inputs and 1 output, line declares {inputs} inputs and {outputs} outputs")]
    Arity {
        kind: GateKind,
        expected: usize,
        inputs: usize,
        outputs: usize,
    },
    #[error("wire {wire} out of range (wire count {wire_count})")]
    WireOutOfRange { wire: usize, wire_count: usize },
    #[error("wire {wire} assigned more than once")]
    DoubleAssignment { wire: usize },
    #[error("wire {wire} used before it is defined")]
    UseBeforeDefine { wire: usize },
    #[error("header declares {declared} gates, found {found}")]
    GateCountMismatch { declared: usize, found: usize },
    #[error("output wire {wire} is never assigned")]
    OutputUnassigned { wire: usize },
}

/// A parse failure with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn numbers(line: usize, text: &str) -> Result<Vec<usize>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| err(line, ParseErrorKind::MalformedHeader(format!("not a number: {t:?}"))))
        })
        .collect()
}

/// `count n_1 ... n_count` on one line.
fn group_line(line: usize, text: &str, what: &str) -> Result<Vec<usize>, ParseError> {
    let nums = numbers(line, text)?;
    match nums.split_first() {
        Some((&n, rest)) if rest.len() == n => Ok(rest.to_vec()),
        _ => Err(err(
            line,
            ParseErrorKind::MalformedHeader(format!("{what} line must be a count followed by that many sizes")),
        )),
    }
}

pub fn parse_bristol(text: &str) -> Result<Circuit, ParseError> {
    // Blank lines carry no meaning; keep original numbers for diagnostics.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let eof = |what: &str| err(text.lines().count().max(1), ParseErrorKind::MalformedHeader(format!("missing {what} line")));

    let (ln, first) = lines.next().ok_or_else(|| eof("gate/wire count"))?;
    let header = numbers(ln, first)?;
    let [gate_count, wire_count] = header[..] else {
        return Err(err(ln, ParseErrorKind::MalformedHeader("expected \"gate_count wire_count\"".into())));
    };
    let (ln, second) = lines.next().ok_or_else(|| eof("input"))?;
    let input_groups = group_line(ln, second, "input")?;
    let (ln, third) = lines.next().ok_or_else(|| eof("output"))?;
    let output_groups = group_line(ln, third, "output")?;

    let n_inputs: usize = input_groups.iter().sum();
    let n_outputs: usize = output_groups.iter().sum();
    if n_inputs > wire_count || n_outputs > wire_count {
        return Err(err(
            ln,
            ParseErrorKind::MalformedHeader(format!(
                "{n_inputs} inputs and {n_outputs} outputs do not fit in {wire_count} wires"
            )),
        ));
    }

    let mut assigned = vec![false; wire_count];
    assigned[..n_inputs].iter_mut().for_each(|a| *a = true);
    let mut gates = Vec::with_capacity(gate_count);
    let mut last_line = ln;

    for (ln, line) in lines {
        last_line = ln;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (kind_tok, nums) = tokens.split_last().expect("line is not empty");
        let kind = GateKind::from_name(kind_tok).ok_or_else(|| {
            if kind_tok.parse::<usize>().is_ok() {
                err(ln, ParseErrorKind::MalformedGate("missing gate kind".into()))
            } else {
                err(ln, ParseErrorKind::UnsupportedGate((*kind_tok).to_string()))
            }
        })?;
        let nums: Vec<usize> = nums
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| err(ln, ParseErrorKind::MalformedGate(format!("not a number: {t:?}"))))
            })
            .collect::<Result<_, _>>()?;
        if nums.len() < 2 {
            return Err(err(ln, ParseErrorKind::MalformedGate("missing input/output counts".into())));
        }
        let (n_in, n_out) = (nums[0], nums[1]);
        if n_in != kind.arity() || n_out != 1 {
            return Err(err(
                ln,
                ParseErrorKind::Arity {
                    kind,
                    expected: kind.arity(),
                    inputs: n_in,
                    outputs: n_out,
                },
            ));
        }
        if nums.len() != 2 + n_in + n_out {
            return Err(err(
                ln,
                ParseErrorKind::MalformedGate(format!("expected {} wire indices, found {}", n_in + n_out, nums.len() - 2)),
            ));
        }
        let (ins, out) = nums[2..].split_at(n_in);
        // An input beyond the wire count can never have been defined.
        for &w in ins {
            if w >= wire_count || !assigned[w] {
                return Err(err(ln, ParseErrorKind::UseBeforeDefine { wire: w }));
            }
        }
        let out = out[0];
        if out >= wire_count {
            return Err(err(ln, ParseErrorKind::WireOutOfRange { wire: out, wire_count }));
        }
        if assigned[out] {
            return Err(err(ln, ParseErrorKind::DoubleAssignment { wire: out }));
        }
        assigned[out] = true;
        gates.push(if n_in == 2 {
            Gate::binary(kind, ins[0], ins[1], out)
        } else {
            Gate::unary(kind, ins[0], out)
        });
    }

    if gates.len() != gate_count {
        return Err(err(
            last_line,
            ParseErrorKind::GateCountMismatch {
                declared: gate_count,
                found: gates.len(),
            },
        ));
    }
    if let Some(wire) = (wire_count - n_outputs..wire_count).find(|&w| !assigned[w]) {
        return Err(err(last_line, ParseErrorKind::OutputUnassigned { wire }));
    }
    Ok(Circuit::from_parts(wire_count, input_groups, output_groups, gates))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN_AND: &str = "1 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n";

    #[test]
    fn minimal_and_circuit() {
        let c = parse_bristol(MIN_AND).unwrap();
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.wire_count(), 3);
        assert_eq!(c.input_groups(), &[1, 1]);
        assert_eq!(c.output_groups(), &[1]);
        assert_eq!(c.gates()[0], Gate::binary(GateKind::And, 0, 1, 2));
    }

    #[test]
    fn whitespace_tolerant() {
        let c = parse_bristol("  1   3 \n\n2 1\t1\n 1 1 \n\n\n2 1 0 1 2 AND   \n\n").unwrap();
        assert_eq!(c, parse_bristol(MIN_AND).unwrap());
    }

    fn kind_of(text: &str) -> (usize, ParseErrorKind) {
        let e = parse_bristol(text).unwrap_err();
        (e.line, e.kind)
    }

    #[test]
    fn use_before_define() {
        assert_eq!(
            kind_of("1 3\n2 1 1\n1 1\n2 1 0 5 2 AND\n"),
            (4, ParseErrorKind::UseBeforeDefine { wire: 5 })
        );
        assert_eq!(
            kind_of("1 3\n2 1 1\n1 1\n2 1 0 1 7 AND\n"),
            (4, ParseErrorKind::WireOutOfRange { wire: 7, wire_count: 3 })
        );
        assert_eq!(
            kind_of("1 6\n2 1 1\n1 1\n2 1 0 5 2 AND\n"),
            (4, ParseErrorKind::UseBeforeDefine { wire: 5 })
        );
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(kind_of("1\n2 1 1\n1 1\n2 1 0 1 2 AND\n"), (1, ParseErrorKind::MalformedHeader(_))));
        assert!(matches!(kind_of("1 3\n2 1\n1 1\n2 1 0 1 2 AND\n"), (2, ParseErrorKind::MalformedHeader(_))));
        assert_eq!(
            kind_of("1 3\n2 1 1\n1 1\n3 1 0 1 1 2 MAND\n"),
            (4, ParseErrorKind::UnsupportedGate("MAND".into()))
        );
        assert_eq!(
            kind_of("2 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n1 1 0 2 INV\n"),
            (5, ParseErrorKind::DoubleAssignment { wire: 2 })
        );
        assert_eq!(
            kind_of("1 3\n2 1 1\n1 1\n2 1 0 1 1 XOR\n"),
            (4, ParseErrorKind::DoubleAssignment { wire: 1 })
        );
        assert!(matches!(kind_of("1 3\n2 1 1\n1 1\n1 1 0 1 2 AND\n"), (4, ParseErrorKind::Arity { .. })));
        assert_eq!(
            kind_of("2 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n"),
            (4, ParseErrorKind::GateCountMismatch { declared: 2, found: 1 })
        );
        assert_eq!(
            kind_of("1 4\n2 1 1\n1 1\n2 1 0 1 2 AND\n"),
            (4, ParseErrorKind::OutputUnassigned { wire: 3 })
        );
        assert!(matches!(kind_of("1 3\n2 1 1\n1 1\n2 1 0 x 2 AND\n"), (4, ParseErrorKind::MalformedGate(_))));
        assert!(matches!(kind_of(""), (_, ParseErrorKind::MalformedHeader(_))));
    }

    #[test]
    fn serialize_round_trip() {
        let c = parse_bristol(MIN_AND).unwrap();
        let text = c.to_bristol();
        assert_eq!(parse_bristol(&text).unwrap(), c);
        assert_eq!(parse_bristol(&text).unwrap().to_bristol(), text);
    }
}
