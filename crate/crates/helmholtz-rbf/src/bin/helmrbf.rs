fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(helmholtz_rbf::cli::run(&args));
}
