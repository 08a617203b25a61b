use std::fmt;

use qgca::eca::EcaError;
use qgca::format::FormatError;
use qgca::{AutomatonError, GroupError, MeasureError, QuasigroupError};

/// Failure kinds, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// The analysis refuted a required property of the input.
    Analysis(String),
    Input(String),
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Analysis(m) => write!(f, "analysis failed: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Resource(m) => write!(f, "resource bound exceeded: {m}"),
        }
    }
}

fn quasigroup_resource(e: &QuasigroupError) -> bool {
    matches!(e, QuasigroupError::OrderTooLarge { .. })
}

fn group_resource(e: &GroupError) -> bool {
    matches!(e, GroupError::OrderTooLarge { .. })
}

fn automaton_resource(e: &AutomatonError) -> bool {
    matches!(e, AutomatonError::TableTooLarge(_) | AutomatonError::PeriodTooLarge(_))
}

fn measure_resource(e: &MeasureError) -> bool {
    match e {
        MeasureError::DepthTooLarge { .. } => true,
        MeasureError::Automaton(a) => automaton_resource(a),
        MeasureError::Group(g) => group_resource(g),
        _ => false,
    }
}

fn classify(resource: bool, message: String) -> CliError {
    if resource {
        CliError::Resource(message)
    } else {
        CliError::Input(message)
    }
}

impl From<QuasigroupError> for CliError {
    fn from(e: QuasigroupError) -> Self {
        classify(quasigroup_resource(&e), e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        classify(group_resource(&e), e.to_string())
    }
}

impl From<AutomatonError> for CliError {
    fn from(e: AutomatonError) -> Self {
        classify(automaton_resource(&e), e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        classify(measure_resource(&e), e.to_string())
    }
}

impl From<EcaError> for CliError {
    fn from(e: EcaError) -> Self {
        let message = e.to_string();
        match e {
            EcaError::SpaceTooLarge { .. } | EcaError::TooManySubspaces(_) => CliError::Resource(message),
            EcaError::NotAbelian
            | EcaError::NotAffine(..)
            | EcaError::NotEndomorphism { .. }
            | EcaError::NotEndomorphicCa(_)
            | EcaError::AperiodicKernelWord(_)
            | EcaError::NonlinearMap => CliError::Analysis(message),
            EcaError::Automaton(a) => a.into(),
            EcaError::Group(g) => g.into(),
            _ => CliError::Input(message),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Quasigroup(q) => q.into(),
            FormatError::Group(g) => g.into(),
            FormatError::Automaton(a) => a.into(),
            FormatError::Measure(m) => m.into(),
            FormatError::Eca(x) => x.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
