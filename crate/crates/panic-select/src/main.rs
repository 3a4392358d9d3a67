fn main() {
    std::process::exit(panic_select::cli::run());
}
