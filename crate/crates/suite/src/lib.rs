//! Holds the `acceptance` test target; there is no library code.
//!
//! The suite lives in its own package so that cargo runs it after every
//! other test binary in the workspace: a failing criterion then cannot
//! hide the results of the remaining tests.
