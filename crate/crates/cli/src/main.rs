fn main() {
    std::process::exit(coolplan_cli::run(std::env::args_os()));
}
