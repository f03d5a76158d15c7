fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(cornerlab::cli::run(&argv));
}
