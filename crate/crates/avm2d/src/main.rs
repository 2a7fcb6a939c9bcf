use avm2d::cli;

fn main() {
    std::process::exit(cli::run(std::env::args_os().skip(1)));
}
