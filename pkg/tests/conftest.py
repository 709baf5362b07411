import json

from tokenviz import Corpus, Document, tokenize_chars, tokenize_words


def word_doc(doc_id, text, label=None, date=None):
    return Document(
        id=doc_id,
        source_text=text,
        tokens=tokenize_words(text),
        order_key=date,
        label=label,
    )


def char_doc(doc_id, text, label=None):
    return Document(id=doc_id, source_text=text, tokens=tokenize_chars(text), label=label)


def word_corpus(*entries):
    """entries: (id, text) or (id, text, label) tuples."""
    return Corpus(documents=tuple(word_doc(*e) for e in entries), token_mode="word")


def char_corpus(*entries):
    return Corpus(documents=tuple(char_doc(*e) for e in entries), token_mode="char")


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return str(path)
