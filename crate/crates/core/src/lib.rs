//! Regional economic structure from two-year GRDP panels.
//!
//! [`klassen`] places each district in one of four growth/contribution
//! quadrants, [`lq`] computes location quotients of the current year, and
//! [`multiview`] clusters the districts of each quadrant with [`hac`].
//! [`output`] renders the results as JSON, Newick, DOT and plain tables.

pub mod cli;
pub mod dataset;
pub mod hac;
pub mod klassen;
pub mod lq;
pub mod multiview;
pub mod output;
