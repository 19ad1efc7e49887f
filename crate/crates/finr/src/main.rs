fn main() { finr::cli::run_placeholder(); }
