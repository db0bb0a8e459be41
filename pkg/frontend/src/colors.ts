// Stable group coloring: the hue is a hash of the group key (the
// smallest source token ID of the group), so a group keeps its color
// across re-renders, sessions, and machines.

export function hashString(text: string): number {
  let hash = 2166136261;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 16777619);
  }
  return hash >>> 0;
}

export function colorForGroup(groupKey: string): string {
  const hue = hashString(groupKey) % 360;
  return `hsl(${hue}, 70%, 82%)`;
}

export function borderColorForGroup(groupKey: string): string {
  const hue = hashString(groupKey) % 360;
  return `hsl(${hue}, 60%, 45%)`;
}
