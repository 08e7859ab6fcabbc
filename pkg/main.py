import logging
import sys

from cli import parse_args, to_run_config
from config import get_log_level
from fuzz_runner import cmd_fuzz_theorem
from quantum.errors import ConfigError, InvalidParamsError, UnknownScenarioError
from runner import EXIT_USAGE, cmd_run, status


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=get_log_level(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = parse_args(argv)
    try:
        config = to_run_config(args)
    except (ConfigError, InvalidParamsError, UnknownScenarioError) as e:
        status(f"Error: {e}")
        return EXIT_USAGE
    if config.seed_generated:
        status(f"No seed given; using generated seed {config.seed}")

    if config.mode == "fuzz":
        return cmd_fuzz_theorem(config)
    return cmd_run(config)


if __name__ == "__main__":
    sys.exit(main())
