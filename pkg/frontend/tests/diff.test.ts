import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { diffLines, diffStats, type DiffLine } from "../src/diff.js";

// brute-force LCS oracle over line arrays (independent of the implementation)
function bruteLcsLength(a: string[], b: string[]): number {
  const table = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = 1; i <= a.length; i++) {
    for (let j = 1; j <= b.length; j++) {
      table[i][j] = a[i - 1] === b[j - 1]
        ? table[i - 1][j - 1] + 1
        : Math.max(table[i - 1][j], table[i][j - 1]);
    }
  }
  return table[a.length][b.length];
}

function checkDiffValidity(before: string, after: string, lines: DiffLine[]): void {
  // deleting the adds reconstructs `before`; deleting the dels reconstructs `after`
  const reBefore = lines.filter((l) => l.op !== "add").map((l) => l.text).join("\n");
  const reAfter = lines.filter((l) => l.op !== "del").map((l) => l.text).join("\n");
  expect(reBefore).toBe(before);
  expect(reAfter).toBe(after);
  // the number of kept lines equals the true LCS length (diff is minimal)
  const same = lines.filter((l) => l.op === "same").length;
  expect(same).toBe(bruteLcsLength(before.split("\n"), after.split("\n")));
}

describe("diffLines", () => {
  it("identical inputs produce only same lines", () => {
    const lines = diffLines("a\nb", "a\nb");
    expect(lines.every((l) => l.op === "same")).toBe(true);
  });

  it("pure insertion and deletion", () => {
    const ins = diffLines("a\nc", "a\nb\nc");
    expect(diffStats(ins)).toEqual({ added: 1, removed: 0 });
    const del = diffLines("a\nb\nc", "a\nc");
    expect(diffStats(del)).toEqual({ added: 0, removed: 1 });
  });

  it("matches the brute-force oracle on random documents", () => {
    let seed = 1234567;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    const vocab = ["reward = 0.0", "if grasped:", "    reward += 1", "return reward", "x = 2"];
    for (let trial = 0; trial < 50; trial++) {
      const mk = () =>
        Array.from({ length: 1 + Math.floor(rand() * 10) }, () =>
          vocab[Math.floor(rand() * vocab.length)],
        ).join("\n");
      const before = mk();
      const after = mk();
      checkDiffValidity(before, after, diffLines(before, after));
    }
  });

  it("highlights the iter0 -> iter1 fixture trace additions", () => {
    const base = join(__dirname, "..", "..", "src", "t2r", "envlab", "data", "rewards");
    const iter0 = readFileSync(join(base, "stackcube_iter0.rdsl"), "utf-8");
    const iter1 = readFileSync(join(base, "stackcube_iter1.rdsl"), "utf-8");
    const lines = diffLines(iter0, iter1);
    checkDiffValidity(iter0, iter1, lines);
    const added = lines.filter((l) => l.op === "add").map((l) => l.text);
    // the trace's revision drops the grasp condition from success and adds
    // the release encouragement
    expect(added.some((t) => t.includes("if not is_grasped:"))).toBe(true);
    expect(added.some((t) => t.includes("reward += 3 if not is_grasped else -3"))).toBe(true);
    const removed = lines.filter((l) => l.op === "del").map((l) => l.text);
    expect(removed.some((t) => t.includes("and not is_grasped"))).toBe(true);
  });
});
