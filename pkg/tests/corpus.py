"""Curated migration scenarios with hand-written expected outputs.

Each scenario fixes the input files, the root selector, the pattern and the
scope, and states the exact bytes of every changed file plus the exact list
of failed usages as ``(file:line:col, usage text, reason)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from textwrap import dedent

from retype.specmodel import builtin_catalog, load_catalog

from .helpers import FIXTURES


def j(text: str) -> str:
    return dedent(text).lstrip("\n")


@dataclass
class Scenario:
    name: str
    files: dict[str, str]
    root: str
    pattern: int
    expected: dict[str, str]
    failed: list[tuple[str, str, str]] = field(default_factory=list)
    scope: str = "File"
    catalog: str | None = None
    retyped: bool = False
    tags: tuple[str, ...] = ()

    def load_catalog(self):
        return load_catalog(self.catalog) if self.catalog else builtin_catalog()

    def after(self) -> dict[str, str]:
        return {**self.files, **self.expected}


def _catalog(*patterns) -> str:
    return json.dumps(list(patterns))


PRECEDENCE_CATALOG = _catalog(
    {
        "From": "java.io.File", "To": "java.nio.file.Path", "ID": 20, "Priority": 1, "Mode": "Classic",
        "Rules": [
            {"Before": "$1$.isFile()", "After": "Files.isRegularFile($1$) && !Files.isSymbolicLink($1$)"},
            {"Before": "$1$.compareTo($2$)", "After": "-$2$.compareTo($1$)"},
        ],
    }
)

REPEATED_CATALOG = _catalog(
    {
        "From": "java.lang.StringBuffer", "To": "java.lang.StringBuilder", "ID": 30, "Priority": 1, "Mode": "Classic",
        "Rules": [
            {"Before": "$1$.append($2$).append($2$)", "After": "$1$.append($2$.repeat(2))"},
            {"Before": "$1$.append($2$)", "After": "$1$.append($2$)"},
            {"Before": "$1$.toString()", "After": "$1$.toString()"},
            {"Before": "new StringBuffer()", "After": "new StringBuilder()"},
        ],
    }
)

RAW_CATALOG = _catalog(
    {
        "From": "java.util.ArrayList", "To": "java.util.List", "ID": 40, "Priority": 1, "Mode": "Classic",
        "Rules": [
            {"Before": "new ArrayList<>()", "After": "new ArrayList<>()"},
            {"Before": "$1$.size()", "After": "$1$.size()"},
        ],
    }
)


def _fixture(name: str, rel: str) -> tuple[str, str]:
    base = FIXTURES / name
    return (base / "before" / rel).read_text(), (base / "after" / rel).read_text()


def _fixture_scenarios() -> list[Scenario]:
    file_before, file_after = _fixture("fig2", "src/A.java")
    validator_before, validator_after = _fixture("fig3", "src/Validator.java")
    retyped = file_before.replace("import java.io.File;\n", "import java.io.File;\nimport java.nio.file.Path;\n")
    retyped = retyped.replace("private File f;", "private Path f;")
    return [
        Scenario("file-field-fixture", {"src/A.java": file_before}, "src/A.java#A.f", 1, {"src/A.java": file_after},
                 tags=("rule-select", "imports")),
        Scenario("function-field-fixture", {"src/Validator.java": validator_before}, "src/Validator.java#Validator.validation", 2,
                 {"src/Validator.java": validator_after}, tags=("generics",)),
        Scenario("suggest-follow-up", {"src/A.java": retyped}, "src/A.java#A.f", 1, {"src/A.java": file_after},
                 retyped=True, tags=("retyped",)),
    ]


SCENARIOS: list[Scenario] = _fixture_scenarios() + [
    Scenario(
        "local-assignment",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                void m(String dir) {
                    File f = new File(dir);
                    File g = f;
                    if (g.exists()) {
                        System.out.println(g.getName());
                    }
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;
            import java.nio.file.Paths;

            class A {
                void m(String dir) {
                    Path f = Paths.get(dir);
                    Path g = f;
                    if (Files.exists(g)) {
                        System.out.println(g.getFileName().toString());
                    }
                }
            }
            """)},
        scope="Local", tags=("Assignment", "Local"),
    ),
    Scenario(
        "argument-passing",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                void m(File f) {
                    check(f);
                }

                boolean check(File target) {
                    return target.isFile();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                void m(Path f) {
                    check(f);
                }

                boolean check(Path target) {
                    return Files.isRegularFile(target);
                }
            }
            """)},
        tags=("ArgumentPassing", "File"),
    ),
    Scenario(
        "return-flow",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                private File cache;

                File current() {
                    return cache;
                }

                String name() {
                    return current().getName();
                }
            }
            """)},
        "A.java#A.cache", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Path;

            class A {
                private Path cache;

                Path current() {
                    return cache;
                }

                String name() {
                    return current().getFileName().toString();
                }
            }
            """)},
        tags=("ReturnFlow",),
    ),
    Scenario(
        "field-access",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                private File home;

                void init(File start) {
                    this.home = start;
                }

                boolean ready() {
                    return home.isDirectory();
                }
            }
            """)},
        "A.java#A.init.start", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                private Path home;

                void init(Path start) {
                    this.home = start;
                }

                boolean ready() {
                    return Files.isDirectory(home);
                }
            }
            """)},
        tags=("FieldAccess",),
    ),
    Scenario(
        "no-matching-rule",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                void m(String dir) {
                    File f = new File(dir);
                    log(f);
                    f.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;
            import java.nio.file.Paths;

            class A {
                void m(String dir) {
                    Path f = Paths.get(dir);
                    log(f);
                    Files.exists(f);
                }
            }
            """)},
        failed=[("A.java:8:13", "f", "NoMatchingRule")],
        tags=("NoMatchingRule",),
    ),
    Scenario(
        "opaque-context",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                void m(File f) {
                    try {
                        f.delete();
                    } finally {
                        f.exists();
                    }
                    boolean ok = f.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                void m(Path f) {
                    try {
                        f.delete();
                    } finally {
                        f.exists();
                    }
                    boolean ok = Files.exists(f);
                }
            }
            """)},
        failed=[("A.java:8:13", "f", "OpaqueContext"), ("A.java:10:13", "f", "OpaqueContext")],
        tags=("OpaqueContext",),
    ),
    Scenario(
        "out-of-scope-file",
        {
            "demo/A.java": j("""
                package demo;

                import java.io.File;

                class A {
                    void m(File f) {
                        new B().take(f);
                        f.exists();
                    }
                }
                """),
            "demo/B.java": j("""
                package demo;

                import java.io.File;

                class B {
                    void take(File other) {
                        other.exists();
                    }
                }
                """),
        },
        "demo/A.java#A.m.f", 1,
        {"demo/A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                void m(Path f) {
                    new B().take(f);
                    Files.exists(f);
                }
            }
            """)},
        failed=[("demo/A.java:7:22", "f", "OutOfScope")],
        tags=("OutOfScope", "File"),
    ),
    Scenario(
        "out-of-scope-local",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                private File last;

                void m(String dir) {
                    File f = new File(dir);
                    last = f;
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.Path;
            import java.nio.file.Paths;

            class A {
                private File last;

                void m(String dir) {
                    Path f = Paths.get(dir);
                    last = f;
                }
            }
            """)},
        failed=[("A.java:10:16", "f", "OutOfScope")],
        scope="Local", tags=("OutOfScope", "Local"),
    ),
    Scenario(
        "ambiguous-overload",
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.Path;

            class A {
                void m(File f) {
                    take(f);
                }

                void take(File a) { }

                void take(Path a) { }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.Path;

            class A {
                void m(Path f) {
                    take(f);
                }

                void take(File a) { }

                void take(Path a) { }
            }
            """)},
        failed=[("A.java:8:14", "f", "AmbiguousOverload")],
        tags=("AmbiguousOverload",),
    ),
    Scenario(
        "project-scope",
        {
            "demo/A.java": j("""
                package demo;

                import java.io.File;

                class A {
                    void m(File f) {
                        new B().take(f);
                    }
                }
                """),
            "demo/B.java": j("""
                package demo;

                import java.io.File;

                class B {
                    void take(File other) {
                        other.exists();
                    }
                }
                """),
        },
        "demo/A.java#A.m.f", 1,
        {
            "demo/A.java": j("""
                package demo;

                import java.nio.file.Path;

                class A {
                    void m(Path f) {
                        new B().take(f);
                    }
                }
                """),
            "demo/B.java": j("""
                package demo;

                import java.nio.file.Files;
                import java.nio.file.Path;

                class B {
                    void take(Path other) {
                        Files.exists(other);
                    }
                }
                """),
        },
        scope="Project", tags=("Project", "ArgumentPassing"),
    ),
    Scenario(
        "generic-binding-integer",
        {"A.java": j("""
            package demo;

            import java.util.function.Function;

            class A {
                boolean allEven(int[] xs, Function<Integer, Boolean> even) {
                    for (int x : xs) {
                        if (!even.apply(x)) {
                            return false;
                        }
                    }
                    return true;
                }
            }
            """)},
        "A.java#A.allEven.even", 2,
        {"A.java": j("""
            package demo;

            import java.util.function.Predicate;

            class A {
                boolean allEven(int[] xs, Predicate<Integer> even) {
                    for (int x : xs) {
                        if (!even.test(x)) {
                            return false;
                        }
                    }
                    return true;
                }
            }
            """)},
        tags=("generics",),
    ),
    Scenario(
        "generic-binding-propagates",
        {"A.java": j("""
            package demo;

            import java.util.function.Function;

            class A {
                private Function<String, Boolean> rule;
                private Function<Integer, Boolean> other;

                void set(Function<String, Boolean> r) {
                    rule = r;
                }

                boolean ok(String s) {
                    return rule.apply(s);
                }
            }
            """)},
        "A.java#A.rule", 2,
        {"A.java": j("""
            package demo;

            import java.util.function.Function;
            import java.util.function.Predicate;

            class A {
                private Predicate<String> rule;
                private Function<Integer, Boolean> other;

                void set(Predicate<String> r) {
                    rule = r;
                }

                boolean ok(String s) {
                    return rule.test(s);
                }
            }
            """)},
        tags=("generics", "Assignment"),
    ),
    Scenario(
        "raw-from-keeps-arguments",
        {"A.java": j("""
            package demo;

            import java.util.ArrayList;

            class A {
                private ArrayList<String> names = new ArrayList<>();

                int count() {
                    return names.size();
                }
            }
            """)},
        "A.java#A.names", 40,
        {"A.java": j("""
            package demo;

            import java.util.ArrayList;
            import java.util.List;

            class A {
                private List<String> names = new ArrayList<>();

                int count() {
                    return names.size();
                }
            }
            """)},
        catalog=RAW_CATALOG, tags=("generics",),
    ),
    Scenario(
        "repeated-holes",
        {"A.java": j("""
            package demo;

            class A {
                String m(String dash, String x, String a, String b) {
                    StringBuffer sb = new StringBuffer();
                    sb.append(dash).append(dash);
                    sb.append(dash).append(x);
                    sb.append(a + b).append(a + b);
                    return sb.toString();
                }
            }
            """)},
        "A.java#A.m.sb", 30,
        {"A.java": j("""
            package demo;

            class A {
                String m(String dash, String x, String a, String b) {
                    StringBuilder sb = new StringBuilder();
                    sb.append(dash.repeat(2));
                    sb.append(dash).append(x);
                    sb.append((a + b).repeat(2));
                    return sb.toString();
                }
            }
            """)},
        catalog=REPEATED_CATALOG, tags=("repeated-holes", "precedence"),
    ),
    Scenario(
        "precedence",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                int m(File f, File a, File b, boolean flag) {
                    if (!f.isFile()) {
                        return 0;
                    }
                    return f.compareTo(flag ? a : b) * 2;
                }
            }
            """)},
        "A.java#A.m.f", 20,
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                int m(Path f, File a, File b, boolean flag) {
                    if (!(Files.isRegularFile(f) && !Files.isSymbolicLink(f))) {
                        return 0;
                    }
                    return -(flag ? a : b).compareTo(f) * 2;
                }
            }
            """)},
        catalog=PRECEDENCE_CATALOG, tags=("precedence",),
    ),
    Scenario(
        "nested-rewrites-compose",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                Object m(File f) {
                    File g = f;
                    return new File(f, g.getName());
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Path;

            class A {
                Object m(Path f) {
                    Path g = f;
                    return f.resolve(g.getFileName().toString());
                }
            }
            """)},
        tags=("composition", "Assignment"),
    ),
    Scenario(
        "root-in-second-hole",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                Object m(File f) {
                    return new File(f, f.getName());
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.Path;

            class A {
                Object m(Path f) {
                    return new File(f, f.getFileName().toString());
                }
            }
            """)},
        failed=[("A.java:7:25", "f", "NoMatchingRule")],
        tags=("NoMatchingRule", "hole-gating"),
    ),
    Scenario(
        "null-and-writes",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                private File f;

                void reset() {
                    f = null;
                }

                boolean has() {
                    return f != null && f.exists();
                }
            }
            """)},
        "A.java#A.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                private Path f;

                void reset() {
                    f = null;
                }

                boolean has() {
                    return f != null && Files.exists(f);
                }
            }
            """)},
        tags=("neutral",),
    ),
    Scenario(
        "string-to-pattern",
        {"A.java": j("""
            package demo;

            class A {
                private String re = "[a-z]+" + "\\\\d";

                boolean check(String line) {
                    return line.matches(re);
                }

                String[] parts(String line) {
                    return line.split(re);
                }
            }
            """)},
        "A.java#A.re", 3,
        {"A.java": j("""
            package demo;

            import java.util.regex.Pattern;

            class A {
                private Pattern re = Pattern.compile("[a-z]+" + "\\\\d");

                boolean check(String line) {
                    return re.matcher(line).matches();
                }

                String[] parts(String line) {
                    return re.split(line);
                }
            }
            """)},
        tags=("value-rule", "imports"),
    ),
    Scenario(
        "random-no-package",
        {"Dice.java": j("""
            import java.util.Random;

            class Dice {
                private final Random rng = new Random();

                int roll() {
                    return rng.nextInt(6) + 1;
                }
            }
            """)},
        "Dice.java#Dice.rng", 5,
        {"Dice.java": j("""
            import java.security.SecureRandom;

            class Dice {
                private final SecureRandom rng = new SecureRandom();

                int roll() {
                    return rng.nextInt(6) + 1;
                }
            }
            """)},
        tags=("imports",),
    ),
    Scenario(
        "no-imports-no-package",
        {"A.java": j("""
            class A {
                boolean m(java.io.File f) {
                    return f.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                boolean m(Path f) {
                    return Files.exists(f);
                }
            }
            """)},
        tags=("imports",),
    ),
    Scenario(
        "package-without-imports",
        {"A.java": j("""
            package demo;

            class A {
                String m(java.io.File f) {
                    return f.getPath();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Path;

            class A {
                String m(Path f) {
                    return f.toString();
                }
            }
            """)},
        tags=("imports",),
    ),
    Scenario(
        "wildcard-import",
        {"A.java": j("""
            package demo;

            import java.io.File;
            import java.nio.file.*;

            class A {
                boolean m(File f) {
                    return f.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.*;

            class A {
                boolean m(Path f) {
                    return Files.exists(f);
                }
            }
            """)},
        tags=("imports",),
    ),
    Scenario(
        "simple-name-conflict",
        {"A.java": j("""
            package demo;

            import com.acme.Path;
            import java.io.File;

            class A {
                Path home;

                boolean m(File f) {
                    return f.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import com.acme.Path;
            import java.nio.file.Files;

            class A {
                Path home;

                boolean m(java.nio.file.Path f) {
                    return Files.exists(f);
                }
            }
            """)},
        tags=("imports",),
    ),
    Scenario(
        "method-return-root",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                File make(String name) {
                    return new File(name);
                }

                boolean ready() {
                    return make("x").exists();
                }
            }
            """)},
        "A.java#A.make()", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;
            import java.nio.file.Paths;

            class A {
                Path make(String name) {
                    return Paths.get(name);
                }

                boolean ready() {
                    return Files.exists(make("x"));
                }
            }
            """)},
        tags=("ReturnFlow", "method-root"),
    ),
    Scenario(
        "co-declared",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                void m(String a) {
                    File f = new File(a), g = null;
                    f.exists();
                    g.exists();
                }
            }
            """)},
        "A.java#A.m.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;
            import java.nio.file.Paths;

            class A {
                void m(String a) {
                    Path f = Paths.get(a), g = null;
                    Files.exists(f);
                    Files.exists(g);
                }
            }
            """)},
        tags=("co-declared",),
    ),
    Scenario(
        "string-buffer-inspection",
        {"A.java": j("""
            package demo;

            class A {
                String join(String x, String y) {
                    StringBuffer sb = new StringBuffer();
                    sb.append(x).append(y);
                    return sb.reverse().toString();
                }
            }
            """)},
        "A.java#A.join.sb", 4,
        {"A.java": j("""
            package demo;

            class A {
                String join(String x, String y) {
                    StringBuilder sb = new StringBuilder();
                    sb.append(x).append(y);
                    return sb.reverse().toString();
                }
            }
            """)},
        tags=("java.lang",),
    ),
    Scenario(
        "incoming-value-unadaptable",
        {"A.java": j("""
            package demo;

            import java.io.File;

            class A {
                private File f;

                void load() {
                    f = Config.location();
                }

                boolean ok() {
                    return f.exists();
                }
            }
            """)},
        "A.java#A.f", 1,
        {"A.java": j("""
            package demo;

            import java.nio.file.Files;
            import java.nio.file.Path;

            class A {
                private Path f;

                void load() {
                    f = Config.location();
                }

                boolean ok() {
                    return Files.exists(f);
                }
            }
            """)},
        failed=[("A.java:9:13", "Config.location()", "NoMatchingRule")],
        tags=("NoMatchingRule", "value-site"),
    ),
    Scenario(
        "project-scope-three-hops",
        {
            "p/Store.java": j("""
                package p;

                import java.io.File;

                public class Store {
                    private File root;

                    public void use(File dir) {
                        this.root = dir;
                    }

                    public boolean ready() {
                        return root.exists();
                    }
                }
                """),
            "p/Main.java": j("""
                package p;

                import java.io.File;

                class Main {
                    void run(String name) {
                        File start = new File(name);
                        File copy = start;
                        new Store().use(copy);
                    }
                }
                """),
        },
        "p/Main.java#Main.run.start", 1,
        {
            "p/Main.java": j("""
                package p;

                import java.nio.file.Path;
                import java.nio.file.Paths;

                class Main {
                    void run(String name) {
                        Path start = Paths.get(name);
                        Path copy = start;
                        new Store().use(copy);
                    }
                }
                """),
            "p/Store.java": j("""
                package p;

                import java.nio.file.Files;
                import java.nio.file.Path;

                public class Store {
                    private Path root;

                    public void use(Path dir) {
                        this.root = dir;
                    }

                    public boolean ready() {
                        return Files.exists(root);
                    }
                }
                """),
        },
        scope="Project", tags=("Project", "Assignment", "ArgumentPassing", "FieldAccess"),
    ),
    Scenario(
        "crlf-preserved",
        {"A.java": "package demo;\r\n\r\nimport java.io.File;\r\n\r\nclass A {\r\n    boolean m(File f) {\r\n        return f.exists();\r\n    }\r\n}\r\n"},
        "A.java#A.m.f", 1,
        {"A.java": "package demo;\r\n\r\nimport java.nio.file.Files;\r\nimport java.nio.file.Path;\r\n\r\nclass A {\r\n    boolean m(Path f) {\r\n        return Files.exists(f);\r\n    }\r\n}\r\n"},
        tags=("bytes",),
    ),
]
