fn main() {
    std::process::exit(psc::run(std::env::args_os()));
}
