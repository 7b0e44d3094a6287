"""Structured type references and simple-name resolution."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_PACKAGES = {
    "java.lang": """
        Object String StringBuilder StringBuffer Integer Long Short Byte Double
        Float Boolean Character Number Math System Thread Runnable Exception
        RuntimeException Error Throwable Class Iterable Comparable CharSequence
        Enum Void IllegalArgumentException IllegalStateException
        NullPointerException UnsupportedOperationException
        IndexOutOfBoundsException AutoCloseable Override Deprecated
        SuppressWarnings FunctionalInterface Process ProcessBuilder Runtime
        ClassLoader InterruptedException ArithmeticException ClassCastException
        NumberFormatException SecurityException StackOverflowError
        OutOfMemoryError AssertionError Cloneable ThreadLocal
    """,
    "java.util": """
        List ArrayList LinkedList Map HashMap LinkedHashMap TreeMap Set HashSet
        LinkedHashSet TreeSet Collection Collections Arrays Iterator Optional
        OptionalInt OptionalLong OptionalDouble Objects Random Date Calendar
        GregorianCalendar Locale Properties Queue Deque ArrayDeque PriorityQueue
        Stack Vector Hashtable Enumeration Comparator Scanner UUID BitSet
        StringJoiner Timer TimerTask TimeZone Currency NavigableMap NavigableSet
        SortedMap SortedSet EnumMap EnumSet IdentityHashMap WeakHashMap
        ListIterator AbstractList AbstractMap NoSuchElementException
        ConcurrentModificationException Formatter Base64 Spliterator
    """,
    "java.util.function": """
        Function BiFunction Predicate BiPredicate Supplier Consumer BiConsumer
        UnaryOperator BinaryOperator IntFunction IntPredicate IntSupplier
        IntConsumer IntUnaryOperator IntBinaryOperator ToIntFunction
        ToLongFunction ToDoubleFunction LongFunction LongPredicate LongSupplier
        DoubleFunction DoublePredicate DoubleSupplier BooleanSupplier
        ObjIntConsumer ToIntBiFunction
    """,
    "java.io": """
        File InputStream OutputStream FileInputStream FileOutputStream Reader
        Writer FileReader FileWriter BufferedReader BufferedWriter
        InputStreamReader OutputStreamWriter PrintStream PrintWriter IOException
        FileNotFoundException UncheckedIOException Serializable Closeable
        ByteArrayInputStream ByteArrayOutputStream StringReader StringWriter
        DataInputStream DataOutputStream ObjectInputStream ObjectOutputStream
        BufferedInputStream BufferedOutputStream FilenameFilter FileFilter
        RandomAccessFile EOFException Console
    """,
    "java.nio.file": """
        Path Paths Files FileSystem FileSystems StandardOpenOption
        StandardCopyOption LinkOption DirectoryStream FileVisitResult
        SimpleFileVisitor PathMatcher NoSuchFileException
        FileAlreadyExistsException InvalidPathException WatchService OpenOption
        CopyOption FileVisitor DirectoryNotEmptyException AccessDeniedException
    """,
    "java.util.regex": "Pattern Matcher MatchResult PatternSyntaxException",
    "java.time": """
        LocalDate LocalDateTime LocalTime Instant Duration Period ZonedDateTime
        ZoneId ZoneOffset OffsetDateTime Clock DayOfWeek Month Year YearMonth
        MonthDay DateTimeException
    """,
}

BUILTIN_TYPES: dict[str, str] = {
    simple: f"{pkg}.{simple}" for pkg, names in _PACKAGES.items() for simple in names.split()
}

PRIMITIVES = frozenset("boolean byte char short int long float double void var".split())

_TYPE_VAR = re.compile(r"[A-Z]")


@dataclass(frozen=True)
class TypeRef:
    fqn: str
    args: tuple[TypeRef, ...] = ()
    dims: int = 0
    raw: str = field(default="", compare=False)

    @property
    def simple(self) -> str:
        return self.fqn.rsplit(".", 1)[-1]

    @property
    def is_type_var(self) -> bool:
        return bool(_TYPE_VAR.fullmatch(self.fqn)) and not self.args and not self.dims

    def __str__(self) -> str:
        s = self.fqn
        if self.fqn in ("? extends", "? super"):
            return f"{self.fqn} {self.args[0]}"
        if self.args:
            s += "<" + ", ".join(str(a) for a in self.args) + ">"
        return s + "[]" * self.dims


def resolve_name(name: str, known: dict[str, str] | None = None) -> str:
    """Fully qualify a possibly dotted type name.

    ``known`` maps simple names to qualified names and takes precedence over
    the built-in JDK table. Unresolvable names come back unchanged.
    """
    if name in PRIMITIVES or name == "?":
        return name
    head, dot, rest = name.partition(".")
    if dot and head[:1].islower():
        return name  # already qualified
    if known and head in known:
        q = known[head]
    else:
        q = BUILTIN_TYPES.get(head, head)
    return q + dot + rest


def match_type(pattern: TypeRef, actual: TypeRef, binding: dict[str, TypeRef] | None = None):
    """Match ``actual`` against a pattern that may contain type variables.

    A pattern written without type arguments accepts any parameterization.
    Returns the (extended) variable binding, or None.
    """
    binding = dict(binding or {})
    if pattern.is_type_var:
        bound = binding.get(pattern.fqn)
        if bound is None:
            binding[pattern.fqn] = actual
            return binding
        return binding if bound == actual else None
    if pattern.fqn != actual.fqn or pattern.dims != actual.dims:
        return None
    if not pattern.args:
        return binding
    if len(pattern.args) != len(actual.args):
        return None
    for p, a in zip(pattern.args, actual.args):
        binding = match_type(p, a, binding)
        if binding is None:
            return None
    return binding


def instantiate(pattern: TypeRef, binding: dict[str, TypeRef]) -> TypeRef:
    if pattern.is_type_var and pattern.fqn in binding:
        return binding[pattern.fqn]
    if not pattern.args:
        return pattern
    return TypeRef(pattern.fqn, tuple(instantiate(a, binding) for a in pattern.args), pattern.dims, pattern.raw)
