use thiserror::Error;

use crate::network::LinkId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("the link relation contains a cycle")]
    CycleDetected,
    #[error("link {0} has no incoming link and is not a source link")]
    DanglingLink(String),
    #[error("missing source: {0}")]
    MissingSource(String),
    #[error("no sinks declared for session {0}")]
    NoSinks(u8),
    #[error("link {link} has {fan_in} incoming links, more than the configured bound {bound}")]
    FanInExceeded { link: String, fan_in: usize, bound: usize },
    #[error("invalid link order: {0}")]
    InvalidOrder(String),
    #[error("regions {parent} and {child} are not adjacent")]
    NotAdjacent { parent: usize, child: usize },
    #[error("decomposition is not a partition of the link set: {0}")]
    NotAPartition(String),
    #[error("invalid region headed by {0}")]
    InvalidRegion(LinkId),
    #[error("unsupported field order {0}")]
    UnsupportedOrder(u64),
    #[error("sink count must be at least 2, got {0}")]
    InvalidN(usize),
    #[error("field of order {order} is too small, at least {needed} required")]
    FieldTooSmall { order: u32, needed: u64 },
    #[error("region graph is not feasible")]
    InfeasibleInput,
    #[error("instance has {links} real links, brute force is limited to {limit}")]
    InstanceTooLarge { links: usize, limit: usize },
    #[error("graph with {0} vertices is too large for exact coloring")]
    TooLarge(usize),
    #[error("infeasible generator parameters: {0}")]
    ParamsInfeasible(String),
    #[error("invalid region graph spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
