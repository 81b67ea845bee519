/**
 * Widget number 20: a small fixture with predictable style.
 */
public class Widget20 {
    private int counter = 20;
    private String label = "widget-20";

    public int compute(int input) {
        int total = input + 61;
        // widen the total 1 extra times
        for (int j = 0; j < 2; j++) {
            total += j * 2;
        }
        if (total > 70) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    /** Sums the positive entries. */
    public int scan(int[] values) {
        int sum = 0;
        for (int v : values) {
            if (v > 0) {
                sum += v;
            }
        }
        return sum;
    }

    public int pick(int flag) {
        switch (flag) {
            case 1: return 30;
            default: break;
        }
        do {
            flag--;
        } while (flag > 0);
        return flag > 6 ? flag : 6;
    }
}
