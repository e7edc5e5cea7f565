// SPDX-License-Identifier: Apache-2.0

use clap::Parser;
use noise_radiance::cli::{main_with, Args};

fn main() {
    std::process::exit(main_with(&Args::parse()));
}
