#!/usr/bin/env python3
"""Regenerate the committed fixture set under fixtures/.

Everything here is deterministic (seeded) so that re-running the script on the
same package set reproduces the same corpora byte-for-byte. The tokenizers are
trained locally with the `tokenizers` library, which also serves as the
reference implementation for the pinned token-id fixtures.

Outputs:
  fixtures/tokenizers/{qwen3,gpt4o,llama3.2,gemma3,gpt2}.json
  fixtures/tokenizers/gpt4o.tiktoken
  fixtures/corpus/prompts_en.csv        natural English prompts (ASCII)
  fixtures/corpus/cjk_100.txt           CJK gate-test lines
  fixtures/corpus/arabic_100.txt        Arabic gate-test lines
  fixtures/pinned/reference_token_ids.json
  fixtures/pinned/encoder_oracle.jsonl  reference outputs of the five encoders
  fixtures/pinned/welch_cases.json      scipy-pinned Welch t-test cases

Usage: python3 tools/make_fixtures.py [--out fixtures]
"""

import argparse
import ast
import base64
import csv
import hashlib
import io
import json
import os
import random
import re
import sys

from tokenizers import Tokenizer, models, pre_tokenizers, decoders, trainers, Regex

SEED = 20250809

# Packages mined for English prose. Docstrings are imperative technical
# English ("Compute the mean of ...", "Return a new array ...") which is a
# reasonable stand-in for instruction-style prompts.
HARVEST_PACKAGES = [
    "numpy",
    "scipy",
    "pandas",
    "sklearn",
    "matplotlib",
    "sympy",
    "statsmodels",
    "networkx",
    "seaborn",
    "joblib",
    "torch",
    "tensorflow",
    "transformers",
    "sqlalchemy",
    "plotly",
    "numba",
    "skimage",
    "pydantic",
    "rich",
    "httpx",
    "fastapi",
    "streamlit",
    "polars",
    "cvxpy",
    "jsonschema",
]

# Pre-tokenization patterns per tokenizer family. These must stay in sync
# with the constants shipped in the Rust crate.
PAT_GPT2 = r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"
PAT_CL100K_STYLE = r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+"
PAT_QWEN = r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+"
PAT_O200K_STYLE = (
    r"[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]*[\p{Ll}\p{Lm}\p{Lo}\p{M}]+(?i:'s|'t|'re|'ve|'m|'ll|'d)?"
    r"|[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]+[\p{Ll}\p{Lm}\p{Lo}\p{M}]*(?i:'s|'t|'re|'ve|'m|'ll|'d)?"
    r"|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n/]*|\s*[\r\n]+|\s+(?!\S)|\s+"
)

# (name, pattern, vocab_size)
FAMILIES = [
    ("qwen3", PAT_QWEN, 40000),
    ("gpt4o", PAT_O200K_STYLE, 48000),
    ("llama3.2", PAT_CL100K_STYLE, 28000),
    ("gemma3", PAT_CL100K_STYLE, 56000),
    ("gpt2", PAT_GPT2, 20000),
]

TRAIN_BYTES_CAP = 24 * 1024 * 1024

RST_NOISE = re.compile(
    r"^\s*(:\w+|>>>|\.\.\.($|\s)|\.\.\s|Parameters\s*$|Returns\s*$|Raises\s*$|"
    r"Examples\s*$|Notes\s*$|References\s*$|See Also\s*$|Attributes\s*$|"
    r"-{3,}|={3,}|\*{3,}|#|@|\$)"
)
CODEY = re.compile(r"(``|::|__|->|\{|\}|\[|\]|=|\\|/|<|>|\|)")
SENT_SPLIT = re.compile(r"(?<=[.!?])\s+(?=[A-Z])")


def iter_docstrings(pkg_dirs):
    for root in pkg_dirs:
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            if "test" in dirpath or "_vendor" in dirpath:
                continue
            for fn in sorted(filenames):
                if not fn.endswith(".py"):
                    continue
                path = os.path.join(dirpath, fn)
                try:
                    with open(path, "r", encoding="utf-8", errors="ignore") as f:
                        tree = ast.parse(f.read())
                except (SyntaxError, ValueError, OSError):
                    continue
                for node in ast.walk(tree):
                    if isinstance(node, (ast.Module, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                        doc = ast.get_docstring(node, clean=True)
                        if doc:
                            yield doc


def doc_to_sentences(doc):
    paragraphs = []
    buf = []
    for line in doc.splitlines():
        if not line.strip():
            if buf:
                paragraphs.append(" ".join(buf))
                buf = []
            continue
        if RST_NOISE.match(line):
            continue
        buf.append(line.strip())
    if buf:
        paragraphs.append(" ".join(buf))
    for para in paragraphs:
        para = re.sub(r"\s+", " ", para).strip()
        for sent in SENT_SPLIT.split(para):
            yield sent.strip()


def good_sentence(s):
    if not (30 <= len(s) <= 400):
        return False
    if not s[0].isupper() or s[-1] not in ".!?":
        return False
    if not all(32 <= ord(c) <= 126 for c in s):
        return False
    if CODEY.search(s):
        return False
    words = s.split()
    if len(words) < 6:
        return False
    letters = sum(c.isalpha() or c == " " for c in s)
    if letters / len(s) < 0.85:
        return False
    if any(len(w) > 24 for w in words):
        return False
    return True


def harvest():
    pkg_dirs = []
    for name in HARVEST_PACKAGES:
        try:
            mod = __import__(name)
        except ImportError:
            continue
        pkg_dirs.append(os.path.dirname(mod.__file__))
    seen = set()
    sentences = []
    for doc in iter_docstrings(pkg_dirs):
        for s in doc_to_sentences(doc):
            if not good_sentence(s):
                continue
            key = s.lower()
            if key in seen:
                continue
            seen.add(key)
            sentences.append(s)
    return sentences


# ---------------------------------------------------------------------------
# Reference encoders (the obfuscation transforms the dataset pipeline must
# reproduce byte-exactly). caesar_encode is intentionally shift-without-wrap
# over '{|}' territory avoided by restricting fixtures to non-wrap letters.
# ---------------------------------------------------------------------------

def b64_encode(text: str) -> str:
    return base64.b64encode(text.encode()).decode()


def reversed_text(text: str) -> str:
    return text[::-1]


def caesar_encode(text: str, shift: int = 3) -> str:
    result = ""
    for char in text:
        if char.isalpha():
            ascii_base = ord("A") if char.isupper() else ord("a")
            shifted = ord(char) - ascii_base + shift
            result += chr(ascii_base + shifted)
        else:
            result += char
    return result


def leetspeak(text: str) -> str:
    return text.translate(str.maketrans("abegilostABEGILOST", "483611057483611057"))


def text_to_binary(text):
    binary = " ".join(format(ord(char), "08b") for char in text)
    return binary


def build_tokenizer(pattern, vocab_size, lines, gpt2_style=False):
    tok = Tokenizer(models.BPE())
    if gpt2_style:
        tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False, use_regex=True)
    else:
        tok.pre_tokenizer = pre_tokenizers.Sequence(
            [
                pre_tokenizers.Split(Regex(pattern), behavior="isolated", invert=False),
                pre_tokenizers.ByteLevel(add_prefix_space=False, use_regex=False),
            ]
        )
    tok.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        special_tokens=[],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
        show_progress=False,
    )
    tok.train_from_iterator(lines, trainer)
    return tok


def byte_level_decoder_map():
    # GPT-2 printable remap: bytes -> stand-in unicode char.
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(0xA1, 0xAD)) + list(range(0xAE, 0x100))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return {chr(c): b for b, c in zip(bs, cs)}


def to_tiktoken(tok_json_path, out_path):
    char2byte = byte_level_decoder_map()
    with open(tok_json_path) as f:
        vocab = json.load(f)["model"]["vocab"]
    entries = sorted(vocab.items(), key=lambda kv: kv[1])
    with open(out_path, "w", newline="\n") as f:
        for token, rank in entries:
            raw = bytes(char2byte[c] for c in token)
            f.write(base64.b64encode(raw).decode() + " " + str(rank) + "\n")


EDGE_TEXTS = [
    "Hello, world!",
    "  leading and trailing spaces  ",
    "tabs\tbetween\twords",
    "line one\nline two\n\nline four",
    "CRLF line\r\nnext",
    "numbers 1234567890 and 3.14159",
    "he's she'll THEY'VE don'T",
    "mixed CASE Words And ACRONYMS NASA",
    "punctuation!!! ??? ... --- ,,,",
    "unicode café naïve über",
    "emoji \U0001f600 and 中文 mixed in",
    "a",
    " ",
    "word",
    "SGVsbG8gd29ybGQh base64 blob QWxhZGRpbjpvcGVuIHNlc2FtZQ==",
    "01001000 01101001 binary run",
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="fixtures")
    args = ap.parse_args()
    out = args.out
    for sub in ("tokenizers", "corpus", "pinned"):
        os.makedirs(os.path.join(out, sub), exist_ok=True)

    rng = random.Random(SEED)
    print("harvesting sentences ...", flush=True)
    sentences = harvest()
    print(f"  {len(sentences)} usable sentences")
    rng.shuffle(sentences)

    # Disjoint split: evaluation prompts vs tokenizer training text.
    eval_pool = sentences[:12000]
    train_pool = sentences[12000:]

    train_text = []
    total = 0
    for s in train_pool:
        train_text.append(s)
        total += len(s) + 1
        if total >= TRAIN_BYTES_CAP:
            break
    print(f"  training corpus: {total / 1e6:.1f} MB, {len(train_text)} sentences")

    # Natural prompt corpus: 1..3 sentences per prompt, ASCII only.
    prompts = []
    i = 0
    while len(prompts) < 1500 and i < len(eval_pool):
        n = rng.choices([1, 2, 3], weights=[60, 30, 10])[0]
        chunk = " ".join(eval_pool[i : i + n])
        i += n
        if len(chunk) <= 600:
            prompts.append(chunk)
    print(f"  prompts: {len(prompts)}")

    with open(os.path.join(out, "corpus", "prompts_en.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["prompt"])
        for p in prompts:
            w.writerow([p])

    # Oracle corpus: restricted to non-wraparound letters for the Caesar
    # comparison (no letters that would shift past 'z'/'Z').
    oracle_prompts = []
    for s in eval_pool[i:]:
        if any(c in "xyzXYZ" for c in s):
            continue
        oracle_prompts.append(s)
        if len(oracle_prompts) == 1000:
            break
    print(f"  oracle prompts: {len(oracle_prompts)}")
    with open(os.path.join(out, "pinned", "encoder_oracle.jsonl"), "w", newline="\n") as f:
        for p in oracle_prompts:
            row = {
                "prompt": p,
                "base64": b64_encode(p),
                "reversed": reversed_text(p),
                "caesar": caesar_encode(p),
                "leetspeak": leetspeak(p),
                "binary": text_to_binary(p),
            }
            f.write(json.dumps(row, ensure_ascii=True, sort_keys=True) + "\n")

    # Gate-test corpora: synthetic CJK and Arabic lines.
    cjk_chars = [chr(c) for c in range(0x4E00, 0x4E00 + 1200)]
    with open(os.path.join(out, "corpus", "cjk_100.txt"), "w", newline="\n") as f:
        for _ in range(100):
            n = rng.randint(6, 40)
            f.write("".join(rng.choice(cjk_chars) for _ in range(n)) + "\n")
    arabic_chars = [chr(c) for c in range(0x0621, 0x064B)]
    with open(os.path.join(out, "corpus", "arabic_100.txt"), "w", newline="\n") as f:
        for _ in range(100):
            words = []
            for _ in range(rng.randint(3, 10)):
                words.append("".join(rng.choice(arabic_chars) for _ in range(rng.randint(2, 8))))
            f.write(" ".join(words) + "\n")

    # Train the tokenizer fixtures.
    toks = {}
    for name, pattern, vocab_size in FAMILIES:
        print(f"training {name} (vocab {vocab_size}) ...", flush=True)
        tok = build_tokenizer(pattern, vocab_size, train_text, gpt2_style=(name == "gpt2"))
        path = os.path.join(out, "tokenizers", f"{name}.json")
        tok.save(path)
        toks[name] = tok
    to_tiktoken(
        os.path.join(out, "tokenizers", "gpt4o.json"),
        os.path.join(out, "tokenizers", "gpt4o.tiktoken"),
    )

    # Pin reference token ids: 64 fixture texts per tokenizer.
    fixture_texts = eval_pool[:48] + EDGE_TEXTS
    pinned = {"texts": fixture_texts, "ids": {}}
    for name, tok in toks.items():
        pinned["ids"][name] = [tok.encode(t).ids for t in fixture_texts]
    with open(os.path.join(out, "pinned", "reference_token_ids.json"), "w", newline="\n") as f:
        json.dump(pinned, f, ensure_ascii=True, indent=0, sort_keys=True)
        f.write("\n")

    # Welch t-test reference cases pinned from scipy.
    from scipy import stats

    cases = []
    vec_rng = random.Random(SEED + 1)
    pairs = [
        ([1.0, 2.0, 3.0], [2.0, 3.0, 4.0]),
        ([1.0, 1.1, 0.9, 1.05, 0.95], [2.0, 2.2, 1.8]),
        (
            [vec_rng.gauss(5.0, 1.0) for _ in range(50)],
            [vec_rng.gauss(2.0, 0.5) for _ in range(80)],
        ),
        (
            [vec_rng.gauss(0.0, 2.0) for _ in range(12)],
            [vec_rng.gauss(0.1, 0.3) for _ in range(400)],
        ),
    ]
    for a, b in pairs:
        res = stats.ttest_ind(a, b, equal_var=False)
        cases.append(
            {
                "a": a,
                "b": b,
                "t": float(res.statistic),
                "p": float(res.pvalue),
                "df": float(res.df),
            }
        )
    with open(os.path.join(out, "pinned", "welch_cases.json"), "w", newline="\n") as f:
        json.dump(cases, f, indent=1)
        f.write("\n")

    # Sanity report: CPT separation and optimal thresholds per tokenizer.
    encoders = {
        "Base64": b64_encode,
        "Reversed": reversed_text,
        "Caesar": caesar_encode,
        "Leetspeak": leetspeak,
        "Binary": text_to_binary,
    }
    print("\nthreshold sanity check (F1-optimal midpoints):")
    for name, tok in toks.items():
        labeled = []
        for p in prompts[:1200]:
            for label, fn in [("Original", lambda s: s)] + list(encoders.items()):
                v = fn(p)
                n_tok = len(tok.encode(v).ids)
                if n_tok == 0:
                    continue
                labeled.append((len(v) / n_tok, label == "Original"))
        labeled.sort()
        cpts = [c for c, _ in labeled]
        n_pos = sum(1 for _, orig in labeled if not orig)
        best = (0.0, 0.0)
        tp = fp = 0
        for idx in range(len(labeled) - 1):
            if labeled[idx][1]:
                fp += 1
            else:
                tp += 1
            if cpts[idx] == cpts[idx + 1]:
                continue
            thr = (cpts[idx] + cpts[idx + 1]) / 2
            fn_ = n_pos - tp
            f1 = 2 * tp / (2 * tp + fp + fn_) if tp else 0.0
            if f1 >= best[0]:
                best = (f1, thr)
        orig_cpts = [c for c, o in labeled if o]
        print(
            f"  {name:9s} thr={best[1]:.3f} f1={best[0]:.4f} "
            f"orig_cpt_mean={sum(orig_cpts)/len(orig_cpts):.2f}"
        )

    print("done.")


if __name__ == "__main__":
    main()
