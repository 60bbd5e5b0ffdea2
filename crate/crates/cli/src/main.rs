use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or(limitsets_cli::LOG_ENV, "off"))
        .format_timestamp(None)
        .init();
    std::process::exit(limitsets_cli::main_with_args(std::env::args_os()));
}
