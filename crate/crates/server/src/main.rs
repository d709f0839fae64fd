fn main() {
    std::process::exit(rdfsheet_server::cli::run(std::env::args_os()));
}
