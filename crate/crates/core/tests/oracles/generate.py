"""Regenerates the frozen oracle values under tests/fixtures/oracles.

Requires sacrebleu 2.x and nltk. Run from this directory:

    python3 generate.py
"""

import json
from pathlib import Path

import sacrebleu
from nltk.tokenize import TreebankWordTokenizer
from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "oracles"

TOKENIZE_13A = [
    "Hello, world!",
    "",
    "3.5%",
    "The price rose from $1,200 to $1,450.",
    "We'll meet at 3:30 p.m. on Friday.",
    "It's 10-15 minutes away.",
    "Call me at 555-0199, please.",
    "\"Quoted\" words and 'single' ones.",
    "Tom &amp; Jerry &lt;3 &gt; &quot;cheese&quot;",
    "Use the <skipped> marker carefully.",
    "Version 2.0.1 was released in 2021.",
    "e-mail, co-operate, and state-of-the-art",
    "What?! No way...",
    "(Parenthetical) remarks [in brackets] {and braces}.",
    "Ratio 3:2; slash a/b; pipe a|b.",
    "He said: \"Don't go.\"",
    "Costs: 5.5, 6.75, and 7.",
    "Temperature -5 to 10-20 degrees.",
    "Hashtags #fun and @mentions ^caret ~tilde.",
    "Backtick `code` and underscore_name.",
    "Numbers like 1,000,000 and .5 and 5.",
    "End with comma,",
    ".Start with period",
    "Multiple   spaces\tand tabs.",
    "Email: john.doe@example.com",
    "URL: https://example.com/path?q=1&x=2",
    "I paid 20% more than last year.",
    "Mr. Smith and Dr. Jones arrived at 9.",
    "Stock is down 3-4 percent.",
    "A+B=C and x*y.",
    "Tokyo, Japan; Osaka, Japan.",
    "Is it 4.5 or 4,5?",
    "They're here, aren't they?",
    "No. 1 priority!",
    "Unicode café and naïve résumé.",
    "Dashes — long and – short.",
    "We shipped 28 backorders today.",
    "Room 12-B is free.",
    "The 1990s-era design.",
    "Q3 results: +12% vs. -3%.",
    "Prices: $5-$10.",
    "Wait... what?",
    "OK.",
    "Sure, sure, sure.",
    "Line one-\nline two",
    "It costs ¥3,000.",
    "Half 1/2 and quarter 1/4.",
    "He's 6'2\" tall.",
    "Done!",
    "What do you think about it?",
]

BLEU_CASES = [
    {
        "name": "three_sentences",
        "tokenize": "13a",
        "hyps": [
            "I think it's a bit sweet.",
            "He said it is a good idea.",
            "What do you think?",
        ],
        "refs": [
            "I think it's a bit naive.",
            "He said it's a good idea.",
            "What do you think about it?",
        ],
    },
    {
        "name": "brevity_penalty",
        "tokenize": "13a",
        "hyps": ["the cat", "a dog barked"],
        "refs": ["the cat sat on the mat", "a dog barked at the mailman loudly"],
    },
    {
        "name": "smoothing_no_four_gram",
        "tokenize": "13a",
        "hyps": ["the quick fox jumps high", "completely different words here"],
        "refs": ["the quick brown fox jumps over", "nothing in common at all"],
    },
    {
        "name": "no_matches",
        "tokenize": "13a",
        "hyps": ["alpha beta", "gamma"],
        "refs": ["delta epsilon", "zeta eta"],
    },
    {
        "name": "longer_than_reference",
        "tokenize": "13a",
        "hyps": ["we will ship the order two days late , sorry about that"],
        "refs": ["we will ship the order two days late."],
    },
    {
        "name": "japanese_chars",
        "tokenize": "char",
        "hyps": ["ちょっと甘いと思います。", "彼は良い考えだと言いました。", "どう思う?"],
        "refs": ["ちょっと甘いと思います。", "彼は良い考えだと言ってました。", "あなたはどう思いますか?"],
    },
    {
        "name": "japanese_mixed",
        "tokenize": "char",
        "hyps": ["来期 の 予算 から 始めましょう", "広告費を増やす必要があります。"],
        "refs": ["来期の予算から始めましょう。", "広告費をもっと増やす必要があると思います。"],
    },
]

ZERO_PRONOUN = [
    "I agree.",
    "It's fine.",
    "They're here, don't you think?",
    "She's given up and just says it can't be helped if it's work.",
    "They all want to know when it will be restocked, don't they?",
    "Thank you for calling.",
    "He said it's a good idea.",
    "What do you think about it?",
    "I'll check with him.",
    "Itinerary attached.",
    "Yesterday's meeting was long.",
    "Could you send the report by Friday?",
    "We need more budget.",
    "THEY approved it!",
    "Hi, Ian.",
    "I'm sure he'd like that.",
    "Let's start with the budget for next quarter.",
    "(It depends.)",
    "\"You're right,\" she said.",
    "Thanks a lot.",
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    tok = Tokenizer13a()
    cases = [{"text": t, "tokens": tok(t.rstrip()).split()} for t in TOKENIZE_13A]
    (OUT / "tokenize_13a.json").write_text(json.dumps(cases, ensure_ascii=False, indent=1) + "\n")

    bleu_out = []
    for case in BLEU_CASES:
        score = sacrebleu.corpus_bleu(case["hyps"], [case["refs"]], tokenize=case["tokenize"])
        bleu_out.append(dict(case, score=score.score, bp=score.bp, sys_len=score.sys_len, ref_len=score.ref_len))
    (OUT / "bleu.json").write_text(json.dumps(bleu_out, ensure_ascii=False, indent=1) + "\n")

    treebank = TreebankWordTokenizer()
    pronouns = {"i", "you", "he", "she", "it", "they"}
    zp = []
    for sentence in ZERO_PRONOUN:
        tokens = treebank.tokenize(sentence)
        zp.append({"text": sentence, "pronouns": sorted({t.lower() for t in tokens if t.lower() in pronouns})})
    (OUT / "zero_pronoun.json").write_text(json.dumps(zp, ensure_ascii=False, indent=1) + "\n")


if __name__ == "__main__":
    main()
