fn main() {
    std::process::exit(solvable_loops::cli::run_command(std::env::args_os()));
}
