from . import (
    compare_command,
    eval_command,
    gen_toy_command,
    gradcheck_command,
    train_command,
    visualize_command,
)

COMMANDS = [
    gen_toy_command,
    train_command,
    eval_command,
    gradcheck_command,
    visualize_command,
    compare_command,
]

__all__ = ["COMMANDS"]
