#!/usr/bin/env python3
"""Independent artifact-code oracle for the golden fixtures.

Reads a draft as N-Quads, masks the temporary self IRI with a single space,
sorts quads by (graph, subject, predicate, object) with IRIs before blank
nodes before literals, hashes the canonical N-Quads with SHA-256 and
encodes the digest as unpadded base64url behind the "RA" prefix. Writes
the code, the canonical N-Quads of the finalized nanopublication and a
TriG rendering of it.

usage: oracle.py np1   (reads np1.draft.nq, writes np1.code, np1.nq, np1.trig)
"""
import base64
import hashlib
import re
import sys

TEMP = "http://purl.org/nanopub/temp/np"
XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
TERM = re.compile(r'<([^>]*)>|_:(\S+)|"((?:[^"\\]|\\.)*)"(?:\^\^<([^>]*)>|@([A-Za-z0-9-]+))?')
UNESC = {"\\\\": "\\", '\\"': '"', "\\n": "\n", "\\r": "\r", "\\t": "\t"}


def parse(path):
    quads = []
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        terms = []
        pos = 0
        while len(terms) < 4:
            m = TERM.match(line, pos)
            assert m, f"bad line: {line}"
            iri, bnode, lex, dt, lang = m.groups()
            if iri is not None:
                terms.append((0, iri))
            elif bnode is not None:
                terms.append((1, bnode))
            else:
                lex = re.sub(r'\\[\\"nrt]', lambda e: UNESC[e.group(0)], lex)
                if dt == XSD_STRING:
                    dt = None
                # literal key: lexical, then datatype (absent first), then language
                terms.append((2, lex, (0, "") if dt is None else (1, dt), (0, "") if lang is None else (1, lang)))
            pos = m.end()
            while pos < len(line) and line[pos] == " ":
                pos += 1
        s, p, o, g = terms
        quads.append((g, s, p, o))
    return quads


def rename(quads, old, new):
    def fix(t):
        if t[0] == 0 and (t[1] == old or t[1].startswith(old + "#")):
            return (0, new + t[1][len(old):])
        return t
    return [tuple(fix(t) for t in q) for q in quads]


def esc(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t") + '"'


def term(t):
    if t[0] == 0:
        return f"<{t[1]}>"
    if t[0] == 1:
        return f"_:{t[1]}"
    out = esc(t[1])
    if t[2][0]:
        out += f"^^<{t[2][1]}>"
    elif t[3][0]:
        out += f"@{t[3][1]}"
    return out


def canonical(quads):
    # Python compares str by code point, which orders UTF-8 bytes the same way.
    return "".join(f"{term(s)} {term(p)} {term(o)} {term(g)} .\n" for g, s, p, o in sorted(quads))


def main(stem):
    draft = parse(f"{stem}.draft.nq")
    digest = hashlib.sha256(canonical(rename(draft, TEMP, " ")).encode("utf-8")).digest()
    code = "RA" + base64.urlsafe_b64encode(digest).decode("ascii").rstrip("=")
    final = rename(draft, TEMP, "http://purl.org/np/" + code)
    with open(f"{stem}.code", "w") as f:
        f.write(code + "\n")
    with open(f"{stem}.nq", "w", encoding="utf-8") as f:
        f.write(canonical(final))
    graphs = {}
    for g, s, p, o in sorted(final):
        graphs.setdefault(g, []).append(f"  {term(s)} {term(p)} {term(o)} .\n")
    with open(f"{stem}.trig", "w", encoding="utf-8") as f:
        f.write("\n".join(f"{term(g)} {{\n{''.join(body)}}}\n" for g, body in graphs.items()))
    print(code)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "np1")
