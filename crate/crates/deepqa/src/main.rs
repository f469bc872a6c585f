fn main() { std::process::exit(deepqa::cli::run(std::env::args())); }
