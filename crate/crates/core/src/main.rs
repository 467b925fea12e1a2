fn main() {
    std::process::exit(sobolev_stab::cli::main_with(std::env::args_os()) as i32);
}
