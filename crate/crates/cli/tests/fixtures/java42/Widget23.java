import java.util.List;
import java.util.Map;
import java.util.ArrayList;

public class Widget23 {
    private int counter = 23;
    private String label = "widget-23";

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 70;
        for (int j = 0; j < 5; j++) {
            total += j * 2;
        }
        if (total > 73) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    public int scan(int[] values) {
        int sum = 0;
        int k = 0;
        while (k < values.length) {
            sum += values[k];
            k++;
        }
        return sum;
    }

    public int pick(int flag) {
        switch (flag) {
            case 1: return 33;
            default: break;
        }
        do {
            flag--;
        } while (flag > 0);
        return flag > 2 ? flag : 2;
    }
}
