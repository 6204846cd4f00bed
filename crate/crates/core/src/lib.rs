// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

pub mod channel;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod noise;
pub mod plme;
pub mod qmath;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
