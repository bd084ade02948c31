"""Recursive-descent parser producing the reward-program AST."""

from __future__ import annotations

from .errors import syntax_error
from .lexer import Token, tokenize
from . import nodes as N


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token plumbing ---

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def check(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def match(self, kind: str, value: str | None = None) -> Token | None:
        if self.check(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None, what: str = "") -> Token:
        tok = self.peek()
        if not self.check(kind, value):
            want = what or value or kind
            found = tok.value or tok.kind
            raise syntax_error(f"expected {want}, found {found!r}", tok.line, tok.col)
        return self.advance()

    # --- grammar ---

    def program(self) -> N.Program:
        d = self.expect("KEYWORD", "def", "'def'")
        name = self.expect("NAME", what="function name")
        if name.value != N.ENTRY_NAME:
            raise syntax_error(
                f"entry function must be named '{N.ENTRY_NAME}', found '{name.value}'",
                name.line, name.col,
            )
        self.expect("OP", "(")
        has_self = False
        first = self.expect("NAME", what="parameter")
        if first.value == "self":
            has_self = True
            self.expect("OP", ",")
            first = self.expect("NAME", what="'action' parameter")
        if first.value != "action":
            raise syntax_error(
                f"entry signature must be ({N.ENTRY_NAME}(action)), found parameter '{first.value}'",
                first.line, first.col,
            )
        self.expect("OP", ")")
        has_annotation = False
        if self.match("OP", "->"):
            ret = self.expect("NAME", what="return annotation")
            if ret.value != "float":
                raise syntax_error(f"return annotation must be 'float', found '{ret.value}'", ret.line, ret.col)
            has_annotation = True
        self.expect("OP", ":")
        body = self.block()
        tok = self.peek()
        if tok.kind != "EOF":
            raise syntax_error(f"unexpected {tok.value or tok.kind!r} after function body", tok.line, tok.col)
        if not body:
            raise syntax_error("empty function body", d.line, d.col)
        return N.Program(body=tuple(body), has_self=has_self, has_annotation=has_annotation,
                         line=d.line, col=d.col)

    def block(self) -> list[N.Stmt]:
        self.expect("NEWLINE", what="newline before indented block")
        self.expect("INDENT", what="indented block")
        stmts = [self.statement()]
        while not self.check("DEDENT") and not self.check("EOF"):
            stmts.append(self.statement())
        self.expect("DEDENT")
        return stmts

    def statement(self) -> N.Stmt:
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.value == "return":
            self.advance()
            expr = self.expression()
            self.expect("NEWLINE")
            return N.Return(expr=expr, line=tok.line, col=tok.col)
        if tok.kind == "KEYWORD" and tok.value == "if":
            return self.if_statement()
        if tok.kind == "NAME":
            nxt = self.tokens[self.pos + 1]
            if nxt.kind == "OP" and nxt.value in ("=", "+=", "-="):
                self.advance()
                op = self.advance().value
                expr = self.expression()
                self.expect("NEWLINE")
                if op == "=":
                    return N.Assign(name=tok.value, expr=expr, line=tok.line, col=tok.col)
                return N.AugAssign(name=tok.value, op=op, expr=expr, line=tok.line, col=tok.col)
        raise syntax_error(
            f"expected a statement (assignment, if, or return), found {tok.value or tok.kind!r}",
            tok.line, tok.col,
        )

    def if_statement(self) -> N.If:
        start = self.expect("KEYWORD", "if")
        branches = []
        cond = self.expression()
        self.expect("OP", ":")
        branches.append((cond, tuple(self.block())))
        orelse: tuple = ()
        while self.check("KEYWORD", "elif"):
            self.advance()
            cond = self.expression()
            self.expect("OP", ":")
            branches.append((cond, tuple(self.block())))
        if self.check("KEYWORD", "else"):
            self.advance()
            self.expect("OP", ":")
            orelse = tuple(self.block())
        return N.If(branches=tuple(branches), orelse=orelse, line=start.line, col=start.col)

    # --- expressions, lowest to highest precedence ---

    def expression(self) -> N.Expr:
        return self.ternary()

    def ternary(self) -> N.Expr:
        value = self.or_expr()
        if self.check("KEYWORD", "if"):
            tok = self.advance()
            cond = self.or_expr()
            self.expect("KEYWORD", "else", "'else' of conditional expression")
            other = self.ternary()
            return N.Ternary(then=value, cond=cond, other=other, line=tok.line, col=tok.col)
        return value

    def or_expr(self) -> N.Expr:
        left = self.and_expr()
        while self.check("KEYWORD", "or"):
            tok = self.advance()
            right = self.and_expr()
            left = N.Binary(op="or", left=left, right=right, line=tok.line, col=tok.col)
        return left

    def and_expr(self) -> N.Expr:
        left = self.not_expr()
        while self.check("KEYWORD", "and"):
            tok = self.advance()
            right = self.not_expr()
            left = N.Binary(op="and", left=left, right=right, line=tok.line, col=tok.col)
        return left

    def not_expr(self) -> N.Expr:
        if self.check("KEYWORD", "not"):
            tok = self.advance()
            return N.Unary(op="not", operand=self.not_expr(), line=tok.line, col=tok.col)
        return self.comparison()

    def comparison(self) -> N.Expr:
        left = self.arith()
        tok = self.peek()
        if tok.kind == "OP" and tok.value in ("<", "<=", ">", ">=", "==", "!="):
            self.advance()
            right = self.arith()
            nxt = self.peek()
            if nxt.kind == "OP" and nxt.value in ("<", "<=", ">", ">=", "==", "!="):
                raise syntax_error("chained comparisons are not supported", nxt.line, nxt.col)
            return N.Binary(op=tok.value, left=left, right=right, line=tok.line, col=tok.col)
        return left

    def arith(self) -> N.Expr:
        left = self.term()
        while self.check("OP", "+") or self.check("OP", "-"):
            tok = self.advance()
            right = self.term()
            left = N.Binary(op=tok.value, left=left, right=right, line=tok.line, col=tok.col)
        return left

    def term(self) -> N.Expr:
        left = self.factor()
        while self.check("OP", "*") or self.check("OP", "/"):
            tok = self.advance()
            right = self.factor()
            left = N.Binary(op=tok.value, left=left, right=right, line=tok.line, col=tok.col)
        return left

    def factor(self) -> N.Expr:
        if self.check("OP", "-"):
            tok = self.advance()
            return N.Unary(op="-", operand=self.factor(), line=tok.line, col=tok.col)
        return self.power()

    def power(self) -> N.Expr:
        base = self.postfix()
        if self.check("OP", "**"):
            tok = self.advance()
            exponent = self.factor()  # right-associative, allows -x in exponent
            return N.Binary(op="**", left=base, right=exponent, line=tok.line, col=tok.col)
        return base

    def postfix(self) -> N.Expr:
        expr = self.atom()
        while self.check("OP", "["):
            tok = self.advance()
            expr = self._subscript(expr, tok)
        return expr

    def _subscript(self, target: N.Expr, tok: Token) -> N.Expr:
        start: int | None = None
        stop: int | None = None
        if self.check("NUMBER"):
            start = self._int_literal()
        if self.match("OP", ":"):
            if self.check("NUMBER"):
                stop = self._int_literal()
            self.expect("OP", "]")
            return N.SliceExpr(target=target, start=start, stop=stop, line=tok.line, col=tok.col)
        self.expect("OP", "]")
        if start is None:
            raise syntax_error("empty subscript", tok.line, tok.col)
        return N.Index(target=target, index=start, line=tok.line, col=tok.col)

    def _int_literal(self) -> int:
        tok = self.expect("NUMBER", what="integer literal")
        value = float(tok.value)
        if not value.is_integer():
            raise syntax_error("subscripts must be integer literals", tok.line, tok.col)
        return int(value)

    def atom(self) -> N.Expr:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return N.Num(value=float(tok.value), text=tok.value, line=tok.line, col=tok.col)
        if tok.kind == "KEYWORD" and tok.value in ("True", "False"):
            self.advance()
            return N.BoolLit(value=tok.value == "True", line=tok.line, col=tok.col)
        if self.match("OP", "("):
            expr = self.expression()
            self.expect("OP", ")")
            return expr
        if tok.kind == "NAME":
            parts = [self.advance().value]
            while self.check("OP", "."):
                self.advance()
                parts.append(self.expect("NAME", what="attribute name").value)
            if self.check("OP", "("):
                self.advance()
                args: list[N.Expr] = []
                if not self.check("OP", ")"):
                    args.append(self.expression())
                    while self.match("OP", ","):
                        if self.check("OP", ")"):  # tolerate trailing comma
                            break
                        args.append(self.expression())
                self.expect("OP", ")")
                return N.Call(func=tuple(parts), args=tuple(args), line=tok.line, col=tok.col)
            if len(parts) == 1:
                return N.Name(id=parts[0], line=tok.line, col=tok.col)
            return N.PathRef(parts=tuple(parts), line=tok.line, col=tok.col)
        raise syntax_error(f"expected an expression, found {tok.value or tok.kind!r}", tok.line, tok.col)


def parse(source: str) -> N.Program:
    """Parse reward-program source into an AST; raises RdslError(SyntaxError)
    with line/col on malformed input."""
    if not isinstance(source, str):
        raise TypeError("source must be str")
    tokens = tokenize(source)
    return _Parser(tokens).program()
