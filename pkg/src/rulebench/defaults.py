"""Access to the assets shipped with the package (prompts, vocabulary, swaps)."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .equivalence import SwapRule, load_swap_rules
from .prompting import COT, PromptConfig, load_examples_dir, load_vocabulary

__all__ = [
    "asset_path",
    "default_prompt_config",
    "default_vocabulary",
    "default_swap_rules",
]


def asset_path(*parts: str) -> Path:
    return Path(str(files("rulebench").joinpath("assets", *parts)))


def default_vocabulary() -> tuple[tuple[str, int, str], ...]:
    return load_vocabulary(asset_path("vocabulary.txt"))


def default_swap_rules() -> frozenset[SwapRule]:
    return load_swap_rules(asset_path("swap_rules.json"))


def default_prompt_config(mode: str = COT, prompts_dir: Path | None = None) -> PromptConfig:
    """Prompt configuration backed by the shipped (or a user-provided) asset directory."""

    base = prompts_dir if prompts_dir is not None else asset_path("prompts")
    instruction = (base / "instruction.txt").read_text(encoding="utf-8")
    template = (base / "template.txt").read_text(encoding="utf-8")
    examples = load_examples_dir(base / "examples")
    return PromptConfig(
        mode=mode,
        examples=examples,
        template_text=template,
        predicate_vocabulary=default_vocabulary(),
        instruction_text=instruction,
    )
