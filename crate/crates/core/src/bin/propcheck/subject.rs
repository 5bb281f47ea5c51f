//! Command-line spellings of filters.

use std::fmt;

use propcheck::solver::PropagatorKind;
use propcheck::{
    as_filter, as_filter_with_state, incremental_wrap, Checker, ConsistencyLevel, EnumerationCap, Error,
    Filter, FilterWithState, Recipe, ReferenceFilter, Result,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckerSpec {
    AllDiff,
    Sum(i64),
}

impl CheckerSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "alldiff" {
            return Ok(CheckerSpec::AllDiff);
        }
        if let Some(c) = s.strip_prefix("sum=") {
            return c
                .trim()
                .parse()
                .map(CheckerSpec::Sum)
                .map_err(|_| Error::Parse(format!("invalid sum constant `{c}`")));
        }
        Err(Error::Parse(format!("unknown checker `{s}`; valid checkers: alldiff, sum=<c>")))
    }

    pub fn build(self, arity: usize) -> Checker {
        match self {
            CheckerSpec::AllDiff => Checker::all_different(arity),
            CheckerSpec::Sum(c) => Checker::sum_equals(arity, c),
        }
    }
}

impl fmt::Display for CheckerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckerSpec::AllDiff => f.write_str("alldiff"),
            CheckerSpec::Sum(c) => write!(f, "sum={c}"),
        }
    }
}

pub fn parse_level(s: &str) -> Result<ConsistencyLevel> {
    s.trim().parse().map_err(|_| {
        Error::Parse(format!("unknown level `{s}`; valid levels: arc, boundz, boundd, range"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Reference(ConsistencyLevel, CheckerSpec),
    Solver(Recipe),
}

/// A parsed spelling that may still lack the sum constant (`sum-bc`).
enum Partial {
    Done(Subject),
    SumWithoutConstant(String),
}

fn parse_partial(s: &str) -> Result<Partial> {
    let s = s.trim();
    if let Some((level, checker)) = s.split_once(':') {
        if !level.contains('+') {
            return Ok(Partial::Done(Subject::Reference(
                parse_level(level)?,
                CheckerSpec::parse(checker)?,
            )));
        }
    }
    if s == "sum-bc" || s.starts_with("sum-bc+") {
        return Ok(Partial::SumWithoutConstant(s["sum-bc".len()..].to_owned()));
    }
    s.parse::<Recipe>().map(|r| Partial::Done(Subject::Solver(r))).map_err(|e| {
        Error::Parse(format!(
            "{e}\nvalid filters: <level>:<checker> with level in arc, boundz, boundd, range and checker in alldiff, sum=<c>; \
             or a recipe sum-bc[=<c>], alldiff-fc, alldiff-ac, optionally followed by +bug:<id>"
        ))
    })
}

impl Subject {
    fn sum_constant(&self) -> Option<i64> {
        match *self {
            Subject::Reference(_, CheckerSpec::Sum(c)) => Some(c),
            Subject::Solver(Recipe { kind: PropagatorKind::SumBc { target }, .. }) => Some(target),
            _ => None,
        }
    }

    pub fn filter(&self, arity: usize, cap: EnumerationCap) -> Box<dyn Filter> {
        match *self {
            Subject::Reference(level, checker) => Box::new(reference(level, checker, arity, cap)),
            Subject::Solver(recipe) => Box::new(as_filter(recipe, arity)),
        }
    }

    pub fn stateful(&self, arity: usize, cap: EnumerationCap) -> Box<dyn FilterWithState> {
        match *self {
            Subject::Reference(level, checker) => {
                Box::new(incremental_wrap(reference(level, checker, arity, cap)))
            }
            Subject::Solver(recipe) => Box::new(as_filter_with_state(recipe, arity)),
        }
    }
}

fn reference(level: ConsistencyLevel, checker: CheckerSpec, arity: usize, cap: EnumerationCap) -> ReferenceFilter {
    ReferenceFilter::new(level, checker.build(arity)).with_cap(cap)
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Reference(level, checker) => write!(f, "{}:{checker}", level.as_str()),
            Subject::Solver(recipe) => write!(f, "{recipe}"),
        }
    }
}

/// Parses both spellings; a bare `sum-bc` takes its constant from the other
/// side.
pub fn parse_pair(trusted: &str, tested: &str) -> Result<(Subject, Subject)> {
    let (t, u) = (parse_partial(trusted)?, parse_partial(tested)?);
    let complete = |p: Partial, other: &Partial| -> Result<Subject> {
        match p {
            Partial::Done(s) => Ok(s),
            Partial::SumWithoutConstant(suffix) => {
                let c = match other {
                    Partial::Done(o) => o.sum_constant(),
                    Partial::SumWithoutConstant(_) => None,
                }
                .ok_or_else(|| {
                    Error::Parse(
                        "`sum-bc` without a constant needs a sum on the other side; write sum-bc=<c>".into(),
                    )
                })?;
                format!("sum-bc={c}{suffix}").parse::<Recipe>().map(Subject::Solver)
            }
        }
    };
    let trusted = complete(t, &u)?;
    let tested = complete(u, &Partial::Done(trusted))?;
    Ok((trusted, tested))
}
